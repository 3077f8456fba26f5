"""Equitable r-colorability defect by exact search.

``ecd(F, r)`` is the least ``|X0|`` such that ``[n] - X0`` splits into ``r``
parts whose sizes differ by at most one and none of which contains a member
of ``F``.  Parts may be empty.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .core import (
    Family,
    InternalInvariantViolation,
    PreconditionError,
    Subset,
    elements_of,
    popcount,
)


@dataclass(frozen=True)
class DefectCertificate:
    n: int
    x0: int
    parts: tuple[int, ...]

    @property
    def defect(self) -> int:
        return popcount(self.x0)

    @property
    def r(self) -> int:
        return len(self.parts)

    @classmethod
    def from_sets(cls, n, x0, parts) -> "DefectCertificate":
        return cls(n, Subset.of(n, x0).mask, tuple(Subset.of(n, p).mask for p in parts))

    def to_json(self) -> dict:
        return {
            "defect": self.defect,
            "x0": list(elements_of(self.x0)),
            "parts": [list(elements_of(p)) for p in self.parts],
        }

    @classmethod
    def from_json(cls, n: int, data: dict) -> "DefectCertificate":
        cert = cls.from_sets(n, data["x0"], data["parts"])
        if "defect" in data and data["defect"] != cert.defect:
            raise PreconditionError("certificate defect does not match |x0|")
        return cert


def is_valid_certificate(F: Family, cert: DefectCertificate, r: int) -> bool:
    """Disjoint cover of ``[n]``, equitable parts, and no member inside a part."""
    if r < 2 or cert.r != r or cert.n != F.n:
        return False
    full = (1 << F.n) - 1
    seen = cert.x0
    for p in cert.parts:
        if p & seen:
            return False
        seen |= p
    if seen != full:
        return False
    sizes = [popcount(p) for p in cert.parts]
    if max(sizes) - min(sizes) > 1:
        return False
    return not any(m & ~p == 0 for p in cert.parts for m in F.masks)


def minimal_members(masks) -> tuple[int, ...]:
    """Inclusion-minimal masks; containment tests only need these."""
    ms = sorted(set(masks), key=popcount)
    keep: list[int] = []
    for m in ms:
        if not any(k & ~m == 0 for k in keep):
            keep.append(m)
    return tuple(sorted(keep))


def _partition_with_defect(n: int, minimal: tuple[int, ...], r: int, d: int):
    """Backtracking search for a certificate with ``|X0| == d``; None if there is none."""
    total = n - d
    q, big_quota = divmod(total, r)
    cap = q + 1 if big_quota else q

    containing = [[m for m in minimal if m >> e & 1] for e in range(n)]
    # singletons can never sit in a part
    forced = [any(m == 1 << e for m in containing[e]) for e in range(n)]
    if sum(forced) > d:
        return None
    order = sorted(range(n), key=lambda e: (-len(containing[e]), e))

    parts = [0] * r
    sizes = [0] * r
    state = {"big": 0, "x0": 0, "x0count": 0}

    def rec(idx: int) -> bool:
        if idx == n:
            return True
        e = order[idx]
        bit = 1 << e
        if not forced[e]:
            empty_tried = False
            for i in range(r):
                size = sizes[i]
                if size == 0:
                    if empty_tried:
                        continue
                    empty_tried = True
                if size >= cap:
                    continue
                becomes_big = big_quota and size == q
                if becomes_big and state["big"] >= big_quota:
                    continue
                newp = parts[i] | bit
                if any(m & ~newp == 0 for m in containing[e]):
                    continue
                parts[i] = newp
                sizes[i] += 1
                if becomes_big:
                    state["big"] += 1
                if rec(idx + 1):
                    return True
                parts[i] ^= bit
                sizes[i] -= 1
                if becomes_big:
                    state["big"] -= 1
        if state["x0count"] < d:
            state["x0"] |= bit
            state["x0count"] += 1
            if rec(idx + 1):
                return True
            state["x0"] ^= bit
            state["x0count"] -= 1
        return False

    if not rec(0):
        return None
    return state["x0"], tuple(parts)


@lru_cache(maxsize=65536)
def _ecd_cached(n: int, minimal: tuple[int, ...], r: int) -> tuple[int, int, tuple[int, ...]]:
    # feasibility is monotone in d: moving one element of a largest part
    # into X0 keeps the partition equitable and member-free
    for d in range(n + 1):
        found = _partition_with_defect(n, minimal, r, d)
        if found is not None:
            x0, parts = found
            return d, x0, parts
    raise InternalInvariantViolation("no certificate even with X0 = [n]")


def ecd(F: Family, r: int) -> tuple[int, DefectCertificate]:
    """Exact equitable ``r``-colorability defect and a witnessing certificate."""
    if r < 2:
        raise PreconditionError("r must be >= 2")
    d, x0, parts = _ecd_cached(F.n, minimal_members(F.masks), r)
    cert = DefectCertificate(F.n, x0, parts)
    if not is_valid_certificate(F, cert, r) or cert.defect != d:
        raise InternalInvariantViolation(f"ecd search produced an invalid certificate {cert.to_json()}")
    return d, cert


def ecd_value(F: Family, r: int) -> int:
    return ecd(F, r)[0]


def has_certificate_with_defect(F: Family, r: int, d: int) -> bool:
    """Whether some valid certificate has exactly ``d`` removed elements."""
    if not 0 <= d <= F.n:
        return False
    return _partition_with_defect(F.n, minimal_members(F.masks), r, d) is not None


def ecd_formula_complete(n: int, k: int, r: int) -> int:
    """Closed form of ``ecd`` for the family of all ``k``-subsets of ``[n]``."""
    if not 1 <= k <= n or r < 2:
        raise PreconditionError("need 1 <= k <= n and r >= 2")
    return max(0, n - r * (k - 1))
