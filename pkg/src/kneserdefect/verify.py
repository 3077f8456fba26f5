"""Bound checks on concrete families, counterexample scans and the
coloring-composition construction used to lift the r = 2 bound to powers of 2."""

from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, islice
from typing import Iterator

from .core import (
    Family,
    InternalInvariantViolation,
    PreconditionError,
    almost_stable_mask,
    elements_of,
    expand,
    popcount,
    restrict,
    stable_subfamily,
)
from .defect import DefectCertificate, ecd, has_certificate_with_defect, is_valid_certificate
from .kneser import Coloring, _Solver, chromatic_number, find_packing, is_proper
from .tucker import is_prime, theorem2_alphas


class TheoremPreconditionError(PreconditionError):
    """The instance is outside a theorem's hypotheses (it may still be a conjecture instance)."""


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def is_power_of_two(r: int) -> bool:
    return r >= 1 and r & (r - 1) == 0


def describe(F: Family) -> str:
    return "sets:" + ";".join(",".join(map(str, s)) for s in F.as_sets())


@dataclass
class BoundReport:
    check: str
    n: int
    family: str
    s: int
    r: int
    variant: str
    chi: int
    bound: int
    holds: bool
    degenerate: bool
    defect: int
    seconds: float
    alpha1: int | None = None
    alpha2: int | None = None
    coloring: dict | None = None
    certificate: dict | None = None
    sets: list = field(default_factory=list)

    def to_json(self) -> dict:
        out = {
            "check": self.check,
            "n": self.n,
            "family": self.family,
            "s": self.s,
            "r": self.r,
            "variant": self.variant,
            "chi": self.chi,
            "bound": self.bound,
            "defect": self.defect,
            "holds": self.holds,
            "degenerate": self.degenerate,
            "seconds": round(self.seconds, 6),
            "coloring": self.coloring,
            "certificate": self.certificate,
            "sets": self.sets,
        }
        if self.alpha1 is not None:
            out["alpha1"] = self.alpha1
            out["alpha2"] = self.alpha2
        return out

    def csv_row(self) -> dict:
        return {
            "n": self.n,
            "k_or_spec": self.family,
            "s": self.s,
            "r_or_p": self.r,
            "chi": self.chi,
            "bound": self.bound,
            "holds": self.holds,
            "seconds": round(self.seconds, 6),
        }


CSV_COLUMNS = ["n", "k_or_spec", "s", "r_or_p", "chi", "bound", "holds", "seconds"]


@lru_cache(maxsize=65536)
def _chi_cached(n: int, masks: tuple[int, ...], r: int) -> tuple[int, tuple[int, ...]]:
    chi, coloring = chromatic_number(Family(n, masks), r)
    return chi, coloring.colors


def stable_chi(F: Family, s: int, r: int, variant: str = "almost") -> tuple[int, Coloring | None]:
    """Chromatic number of KG^r on the stable part; ``(0, None)`` when that part is empty."""
    Fs = stable_subfamily(F, s, variant).canonical()
    if not len(Fs):
        return 0, None
    chi, colors = _chi_cached(Fs.n, Fs.masks, r)
    return chi, Coloring(Fs, colors, chi)


def _report(check, F, s, r, variant, bound_from, label=None) -> BoundReport:
    start = time.perf_counter()
    chi, coloring = stable_chi(F, s, r, variant)
    defect, cert, bound, extra = bound_from()
    return BoundReport(
        check=check,
        n=F.n,
        family=label or describe(F),
        s=s,
        r=r,
        variant=variant,
        chi=chi,
        bound=bound,
        holds=chi >= bound,
        degenerate=chi == 0 or bound <= 0,
        defect=defect,
        seconds=time.perf_counter() - start,
        coloring=None if coloring is None else coloring.to_json(),
        certificate=cert.to_json(),
        sets=F.as_sets(),
        **extra,
    )


def thm1_check(F: Family, s: int, r: int, label: str | None = None) -> BoundReport:
    """``chi(KG^r(F_s)) >= ceil(ecd^s(F) / (r - 1))`` for ``r`` a power of 2 dividing ``s``."""
    if r < 2 or not is_power_of_two(r):
        raise TheoremPreconditionError(f"r={r} is not a power of 2")
    if s < r or s % r:
        raise TheoremPreconditionError(f"s={s} is not a positive multiple of r={r}")

    def bound():
        d, cert = ecd(F, s)
        return d, cert, _ceil_div(d, r - 1), {}

    return _report("thm1", F, s, r, "almost", bound, label)


def thm2_check(F: Family, s: int, p: int, label: str | None = None) -> BoundReport:
    """``chi(KG^p(F_s)) >= ceil((n - alpha1 - alpha2) / (p - 1))`` for prime ``p``."""
    if not is_prime(p):
        raise TheoremPreconditionError(f"p={p} is not prime")
    if s < 2:
        raise TheoremPreconditionError("s must be >= 2")

    def bound():
        d, cert = ecd(F, p)
        a1, a2 = theorem2_alphas(F.n, d, s, p)
        return d, cert, _ceil_div(F.n - a1 - a2, p - 1), {"alpha1": a1, "alpha2": a2}

    return _report("thm2", F, s, p, "almost", bound, label)


def conjecture_check(
    F: Family, s: int, r: int, variant: str = "almost", label: str | None = None, exploratory: bool = False
) -> BoundReport:
    """The bound ``ceil(ecd^s(F)/(r-1))`` against the almost-stable (``variant="almost"``)
    or cyclically stable (``variant="cyclic"``) part.

    ``exploratory=True`` admits ``2 <= s < r``, outside the conjectured range.
    """
    if r < 2 or s < 2:
        raise PreconditionError("need r >= 2 and s >= 2")
    if s < r and not exploratory:
        raise PreconditionError(f"the conjecture is stated for s >= r (got s={s}, r={r})")

    def bound():
        d, cert = ecd(F, s)
        return d, cert, _ceil_div(d, r - 1), {}

    check = "conj1" if variant == "almost" else "conj2"
    return _report(check, F, s, r, variant, bound, label)


def reverify(report: BoundReport) -> bool:
    """Recompute a report from scratch: fresh solver, uncached defect search."""
    F = Family.from_sets(report.n, report.sets)
    variant = report.variant
    Fs = stable_subfamily(F, report.s, variant)
    r = report.r
    if len(Fs):
        solver = _Solver(Fs, r)
        found = solver.color(report.chi)
        if found is None or (report.chi > 1 and solver.color(report.chi - 1) is not None):
            return False
        if not is_proper(Fs, Coloring(Fs, tuple(found), report.chi), r):
            return False
    elif report.chi != 0:
        return False
    parts = report.s if report.check != "thm2" else report.r
    cert = DefectCertificate.from_json(report.n, report.certificate)
    if parts >= 2:
        if not is_valid_certificate(F, cert, parts) or cert.defect != report.defect:
            return False
        if report.defect > 0 and has_certificate_with_defect(F, parts, report.defect - 1):
            return False
    return report.holds == (report.chi >= report.bound)


# -- family generators and scans ----------------------------------------------


@dataclass(frozen=True)
class FamilyGenerator:
    """Deterministic stream of families.

    ``kind="exhaustive"``: every family of 1..``max_members`` distinct
    non-empty subsets of ``[n]``, in combination order.
    ``kind="random"``: ``count`` seeded samples with ``n`` drawn from
    ``n_min..n``, ``1..max_members`` distinct random non-empty members.
    """

    kind: str
    n: int
    max_members: int
    count: int = 0
    seed: int = 0
    n_min: int | None = None

    def __iter__(self) -> Iterator[Family]:
        if self.kind == "exhaustive":
            universe = list(range(1, 1 << self.n))
            for size in range(1, self.max_members + 1):
                for combo in combinations(universe, size):
                    yield Family(self.n, combo)
        elif self.kind == "random":
            rng = random.Random(self.seed)
            lo = self.n_min or self.n
            for _ in range(self.count):
                n = rng.randint(lo, self.n)
                size = rng.randint(1, min(self.max_members, (1 << n) - 1))
                yield Family(n, tuple(rng.sample(range(1, 1 << n), size)))
        else:
            raise PreconditionError(f"unknown generator kind {self.kind!r}")

    def total(self) -> int:
        if self.kind == "exhaustive":
            from math import comb

            u = (1 << self.n) - 1
            return sum(comb(u, k) for k in range(1, self.max_members + 1))
        return self.count


@dataclass
class ScanResult:
    failures: list[BoundReport]
    checked: int
    complete: bool
    total: int | None

    def to_json(self) -> dict:
        return {
            "checked": self.checked,
            "complete": self.complete,
            "total": self.total,
            "failures": [r.to_json() for r in self.failures],
        }


CHECKS = ("thm1", "thm2", "conjecture")


def run_check(check: str, F: Family, s: int, r: int, variant: str = "almost", exploratory: bool = False) -> BoundReport:
    if check == "thm1":
        return thm1_check(F, s, r)
    if check == "thm2":
        return thm2_check(F, s, r)
    if check == "conjecture":
        return conjecture_check(F, s, r, variant, exploratory=exploratory)
    raise PreconditionError(f"unknown check {check!r}")


def _scan_chunk(args) -> list[BoundReport]:
    check, families, s, r, variant, exploratory = args
    out = []
    for F in families:
        rep = run_check(check, F, s, r, variant, exploratory)
        if not rep.holds:
            out.append(rep)
    return out


def counterexample_scan(
    generator: FamilyGenerator,
    s: int,
    r: int,
    variant: str = "almost",
    budget: int | None = None,
    check: str = "conjecture",
    jobs: int = 1,
    exploratory: bool = False,
    time_budget: float | None = None,
    chunk: int = 2000,
) -> ScanResult:
    """Check up to ``budget`` families; return the re-verified ``holds=False`` reports.

    Running out of budget (count or seconds) before the generator is
    exhausted yields ``complete=False``, not an error.  Chunks are merged in
    generator order, so ``jobs`` never changes the result.
    """
    if budget is not None and budget < 0:
        raise PreconditionError("budget must be >= 0")
    deadline = None if time_budget is None else time.monotonic() + time_budget
    it = iter(generator)
    if budget is not None:
        it = islice(it, budget)

    def chunks():
        while True:
            block = list(islice(it, chunk))
            if not block:
                return
            yield (check, block, s, r, variant, exploratory)

    found: list[BoundReport] = []
    checked = 0
    timed_out = False
    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        source = chunks()
        while True:
            if deadline is not None and time.monotonic() > deadline:
                timed_out = True
                break
            wave = list(islice(source, max(jobs, 1)))
            if not wave:
                break
            parts = pool.map(_scan_chunk, wave) if pool else map(_scan_chunk, wave)
            for args, part in zip(wave, parts):
                found.extend(part)
                checked += len(args[1])
    finally:
        if pool:
            pool.shutdown()

    total = generator.total()
    complete = not timed_out and checked == total
    failures = []
    for rep in found:
        if not reverify(rep):
            raise InternalInvariantViolation(f"scan report failed re-verification: {rep.family}")
        failures.append(rep)
    return ScanResult(failures=failures, checked=checked, complete=complete, total=total)


# -- lemma construction -------------------------------------------------------


@dataclass
class LemmaWitness:
    fprime: Family
    fprime_stable: Family
    cprime: Coloring | None
    proper: bool
    packings: dict
    t: int
    fprime_certificate: DefectCertificate
    composed: DefectCertificate
    composed_valid: bool
    accounting: dict

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "fprime_size": len(self.fprime),
            "fprime_stable": self.fprime_stable.as_sets(),
            "cprime": None if self.cprime is None else self.cprime.to_json(),
            "proper": self.proper,
            "packings": {
                str(list(elements_of(X))): [list(elements_of(b)) for b in bs] for X, bs in self.packings.items()
            },
            "fprime_certificate": self.fprime_certificate.to_json(),
            "composed": self.composed.to_json(),
            "composed_valid": self.composed_valid,
            "accounting": self.accounting,
        }


def _pad_removed(x0: int, parts: list[int], target: int) -> tuple[int, list[int]]:
    """Move elements from the largest parts into ``x0`` until it has ``target`` elements."""
    parts = list(parts)
    while popcount(x0) < target:
        i = max(range(len(parts)), key=lambda j: (popcount(parts[j]), -j))
        if not parts[i]:
            break
        top = 1 << (parts[i].bit_length() - 1)
        parts[i] ^= top
        x0 |= top
    return x0, parts


def lemma_compose_witness(F: Family, r1: int, r2: int, s2: int, coloring: Coloring, max_n: int = 12) -> LemmaWitness:
    """Build ``F' = {X : ecd^{s2}(F|_X) > (r2-1) t}`` and the induced coloring
    of KG^{r1}(F'_{r1}), then compose defect certificates back into one for ``F``
    with ``r1 * s2`` parts.

    ``coloring`` is a proper coloring of KG^{r1 r2}(F_{r1 s2}) with ``t`` colors.
    """
    n = F.n
    if n > max_n:
        raise PreconditionError(f"n={n} exceeds the enumeration guard {max_n}")
    if min(r1, r2, s2) < 2:
        raise PreconditionError("need r1, r2, s2 >= 2")
    s, r, t = r1 * s2, r1 * r2, coloring.t
    Fs = stable_subfamily(F, s)
    colors = coloring.as_dict()
    if any(m not in colors for m in Fs.masks):
        raise PreconditionError("coloring does not cover F_s")
    Fs_coloring = Coloring(Fs, tuple(colors[m] for m in Fs.masks), t)
    if not is_proper(Fs, Fs_coloring, r):
        raise PreconditionError(f"input coloring is not proper on KG^{r}(F_{s})")

    threshold = (r2 - 1) * t
    fprime = [X for X in range(1, 1 << n) if ecd(restrict(F, X), s2)[0] > threshold]
    fprime_family = Family(n, tuple(fprime))
    stable_X = [X for X in fprime if almost_stable_mask(X, r1)]

    packings: dict[int, tuple[int, ...]] = {}
    cprime_colors = []
    for X in stable_X:
        local = stable_subfamily(restrict(F, X), s2)
        lifted = [expand(m, X) for m in local.masks]
        by_color: dict[int, list[int]] = {}
        for m in lifted:
            c = colors.get(m)
            if c is None:
                raise InternalInvariantViolation(f"{list(elements_of(m))} is not in F_{s} although X is {r1}-stable")
            by_color.setdefault(c, []).append(m)
        for c in sorted(by_color):
            hit = find_packing(by_color[c], r2)
            if hit is not None:
                packings[X] = tuple(by_color[c][i] for i in hit)
                cprime_colors.append(c)
                break
        else:
            raise InternalInvariantViolation(f"no {r2} disjoint same-colored members inside X={list(elements_of(X))}")

    Fp_stable = Family(n, tuple(stable_X))
    if stable_X:
        cprime = Coloring(Fp_stable, tuple(cprime_colors), t)
        proper = is_proper(Fp_stable, cprime, r1)
    else:
        cprime = None
        proper = True

    d1, outer = ecd(fprime_family, r1)
    x0 = outer.x0
    parts: list[int] = []
    inner_defects = []
    for Xi in outer.parts:
        local = restrict(F, Xi)
        di, inner = ecd(local, s2)
        inner_defects.append(di)
        if di > threshold:
            raise InternalInvariantViolation(f"part {list(elements_of(Xi))} has inner defect {di} > {threshold}")
        ix0, iparts = _pad_removed(inner.x0, list(inner.parts), min(threshold, popcount(Xi)))
        x0 |= expand(ix0, Xi)
        parts.extend(expand(p, Xi) for p in iparts)
    composed = DefectCertificate(n, x0, tuple(parts))
    valid = is_valid_certificate(F, composed, s)
    accounting = {
        "outer_defect": d1,
        "outer_bound": (r1 - 1) * t,
        "inner_defects": inner_defects,
        "inner_bound": threshold,
        "composed_defect": composed.defect,
        "composed_bound": (r - 1) * t,
        "consistent": valid and d1 <= (r1 - 1) * t and composed.defect <= (r - 1) * t,
    }
    return LemmaWitness(
        fprime=fprime_family,
        fprime_stable=Fp_stable,
        cprime=cprime,
        proper=proper,
        packings=packings,
        t=t,
        fprime_certificate=outer,
        composed=composed,
        composed_valid=valid,
        accounting=accounting,
    )


def remark_equality(n: int, k: int, s: int) -> tuple[int, int]:
    """``(chi, n - s(k-1))`` for KG^2 on the almost ``s``-stable ``k``-subsets of ``[n]``."""
    from .core import complete_k_family

    chi, _ = stable_chi(complete_k_family(n, k), s, 2)
    return chi, n - s * (k - 1)
