"""The Z_2 and Z_p labelings behind the chromatic lower bounds, plus auditors.

A Z_2 face is a non-empty signed set over ``[n]`` with distinct absolute
values, stored as ``(pos, neg)`` bit masks.  A Z_p face assigns a class in
``Z_p = {0..p-1}`` to some positions, stored as ``p`` disjoint masks, one per
class.  Both labelings are pure functions of the face and a context record
holding the family, a proper coloring of its stable part and the derived
constants.

The auditors enumerate every face and check the conditions the Tucker and
Z_p-Tucker lemmas need.  They do not prove those lemmas; they only confirm
that the labelings satisfy the hypotheses on the given instance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Sequence

from .core import (
    Family,
    GuardExceeded,
    InternalInvariantViolation,
    PreconditionError,
    almost_stable_mask,
    elements_of,
    order_key,
    popcount,
    stable_subfamily,
)
from .defect import ecd
from .kneser import Coloring, is_proper

MAX_Z2_N = 12
MAX_ZP_FACES = 4 ** 8


def _submasks(mask: int) -> Iterator[int]:
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(p ** 0.5) + 1))


# -- Z_2 faces ---------------------------------------------------------------


@dataclass(frozen=True, order=True)
class SignedFace:
    n: int
    pos: int
    neg: int

    def __post_init__(self):
        if self.pos & self.neg:
            raise PreconditionError("two entries share an absolute value")
        if not (self.pos | self.neg):
            raise PreconditionError("faces are non-empty")
        if (self.pos | self.neg) >> self.n:
            raise PreconditionError(f"entry outside +-[1, {self.n}]")

    @classmethod
    def of(cls, n: int, entries: Sequence[int]) -> "SignedFace":
        if len({abs(e) for e in entries}) != len(entries) or 0 in entries:
            raise PreconditionError(f"bad signed face {list(entries)}")
        pos = neg = 0
        for e in entries:
            if not 1 <= abs(e) <= n:
                raise PreconditionError(f"entry {e} outside +-[1, {n}]")
            if e > 0:
                pos |= 1 << (e - 1)
            else:
                neg |= 1 << (-e - 1)
        return cls(n, pos, neg)

    @property
    def entries(self) -> tuple[int, ...]:
        """Signed entries sorted by absolute value."""
        out = []
        for i in range(self.n):
            if self.pos >> i & 1:
                out.append(i + 1)
            elif self.neg >> i & 1:
                out.append(-(i + 1))
        return tuple(out)

    @property
    def support(self) -> int:
        return self.pos | self.neg

    def __neg__(self) -> "SignedFace":
        return SignedFace(self.n, self.neg, self.pos)

    def __len__(self) -> int:
        return popcount(self.support)

    def issubset(self, other: "SignedFace") -> bool:
        return self.pos & ~other.pos == 0 and self.neg & ~other.neg == 0

    def __repr__(self) -> str:
        return f"SignedFace({list(self.entries)})"


def faces_z2(n: int) -> Iterator[SignedFace]:
    """Every non-empty signed face over ``[n]``, ``3**n - 1`` of them."""
    if not 1 <= n <= MAX_Z2_N:
        raise GuardExceeded(f"Z_2 face enumeration needs 1 <= n <= {MAX_Z2_N}")
    for signs in product((0, 1, -1), repeat=n):
        pos = neg = 0
        for i, v in enumerate(signs):
            if v == 1:
                pos |= 1 << i
            elif v == -1:
                neg |= 1 << i
        if pos | neg:
            yield SignedFace(n, pos, neg)


def _alt_masks(pos: int, neg: int) -> tuple[int, int]:
    # a largest alternating subset takes one entry per maximal sign run;
    # the last entry of each run is the colex-largest choice
    apos = aneg = 0
    support = pos | neg
    i = 0
    while support >> i:
        if support >> i & 1:
            sign = pos >> i & 1
            j = i + 1
            while support >> j and not (support >> j & 1):
                j += 1
            nxt_same = bool(support >> j & 1) and (pos >> j & 1) == sign
            if not nxt_same:
                if sign:
                    apos |= 1 << i
                else:
                    aneg |= 1 << i
            i = j
        else:
            i += 1
    return apos, aneg


def alt(A: SignedFace) -> SignedFace:
    """Largest alternating subset of ``A`` under the global subset order."""
    apos, aneg = _alt_masks(A.pos, A.neg)
    return SignedFace(A.n, apos, aneg)


def sgn_z2(A: SignedFace) -> int:
    low = A.support & -A.support
    return 1 if A.pos & low else -1


@dataclass(frozen=True)
class Z2Context:
    """Everything the Z_2 labeling needs besides the face itself."""

    family: Family
    coloring: Coloring
    s: int
    defect: int
    alpha: int
    t: int
    m: int
    by_size_desc: tuple[int, ...] = field(repr=False)
    color: dict = field(repr=False, compare=False, hash=False)

    @property
    def n(self) -> int:
        return self.family.n


def z2_context(F: Family, coloring: Coloring, s: int) -> Z2Context:
    if s < 2 or s % 2:
        raise PreconditionError("the Z_2 labeling needs an even s >= 2")
    Fs = stable_subfamily(F, s)
    colors = coloring.as_dict()
    missing = [list(elements_of(m)) for m in Fs.masks if m not in colors]
    if missing:
        raise PreconditionError(f"coloring does not cover stable members {missing}")
    d = ecd(F, s)[0]
    alpha = F.n - d
    return Z2Context(
        family=F,
        coloring=coloring,
        s=s,
        defect=d,
        alpha=alpha,
        t=coloring.t,
        m=alpha + coloring.t,
        by_size_desc=tuple(sorted(set(F.masks), key=order_key, reverse=True)),
        color=colors,
    )


def _round_robin(alt_support: int, s: int) -> list[int]:
    """Split the sorted support into ``s`` classes by position mod ``s``."""
    parts = [0] * s
    j = 0
    for i in range(alt_support.bit_length()):
        if alt_support >> i & 1:
            parts[j % s] |= 1 << i
            j += 1
    return parts


def _lambda_z2(pos: int, neg: int, ctx: Z2Context) -> int:
    apos, aneg = _alt_masks(pos, neg)
    support = apos | aneg
    size = popcount(support)
    if size <= ctx.alpha:
        low = (pos | neg) & -(pos | neg)
        return size if pos & low else -size
    parts = _round_robin(support, ctx.s)
    for F in ctx.by_size_desc:
        if any(F & ~X == 0 for X in parts):
            break
    else:
        raise InternalInvariantViolation(
            f"no member inside the round-robin split of face {SignedFace(ctx.n, pos, neg)!r}"
        )
    c = ctx.color.get(F)
    if c is None:
        raise InternalInvariantViolation(f"chosen member {list(elements_of(F))} is not colored")
    if F & ~pos == 0:
        return c + ctx.alpha
    if F & ~neg == 0:
        return -(c + ctx.alpha)
    raise InternalInvariantViolation(f"chosen member {list(elements_of(F))} has mixed signs")


def lambda_z2(A: SignedFace, ctx: Z2Context) -> int:
    """Label in ``{+-1, ..., +-m}``.

    Short alternating subsets give ``sgn(A) * |alt(A)|``; long ones are split
    round-robin into ``s`` classes, the largest member inside a class is
    picked, and its color shifted by ``alpha`` is returned with the sign of
    the side it lies on.
    """
    if A.n != ctx.n:
        raise PreconditionError("face and context have different ground sets")
    return _lambda_z2(A.pos, A.neg, ctx)


@dataclass
class AuditReport:
    faces: int
    violations: list[dict]
    m: int
    alpha: int
    bound_holds: bool
    n: int
    t: int
    proper: bool
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v["kind"] for v in self.violations}

    def to_json(self) -> dict:
        out = {
            "faces": self.faces,
            "violations": self.violations,
            "m": self.m,
            "alpha": self.alpha,
            "bound_holds": self.bound_holds,
            "n": self.n,
            "t": self.t,
            "proper": self.proper,
        }
        out.update(self.extra)
        return out


def _z2_face_json(n: int, pos: int, neg: int) -> list[int]:
    return list(SignedFace(n, pos, neg).entries)


def _normalized(violations: list[dict]) -> list[dict]:
    return sorted(violations, key=lambda v: (v["kind"], json.dumps(v["faces"])))


def audit_tucker_z2(F: Family, coloring: Coloring, s: int, labels=None, max_violations: int = 100) -> AuditReport:
    """Check equivariance, the ``A <= B`` consistency condition and the label
    range over all ``3**n - 1`` faces.

    ``labels`` may be passed to audit a precomputed (for instance corrupted)
    labeling keyed by ``(pos, neg)``.
    """
    n = F.n
    if not 1 <= n <= MAX_Z2_N:
        raise GuardExceeded(f"Z_2 audit needs 1 <= n <= {MAX_Z2_N}")
    ctx = z2_context(F, coloring, s)
    Fs = stable_subfamily(F, s)
    proper = is_proper(Fs, Coloring(Fs, tuple(ctx.color[m] for m in Fs.masks), coloring.t), 2) if len(Fs) else True

    if labels is None:
        labels = {(A.pos, A.neg): _lambda_z2(A.pos, A.neg, ctx) for A in faces_z2(n)}
    violations: list[dict] = []

    def report(kind: str, *faces) -> None:
        if len(violations) < max_violations:
            violations.append({"kind": kind, "faces": [_z2_face_json(n, *f) for f in faces]})

    for (pos, neg), lab in labels.items():
        if lab == 0 or abs(lab) > ctx.m:
            report("range", (pos, neg))
        if labels[(neg, pos)] != -lab:
            report("equivariance", (pos, neg))
        apos, aneg = _alt_masks(pos, neg)
        if popcount(apos | aneg) > ctx.alpha:
            sizes = [popcount(X) for X in _round_robin(apos | aneg, s)]
            if max(sizes) - min(sizes) > 1:
                report("equitable", (pos, neg))

    # every pair A < B: enumerate sub-faces of each B
    for (bpos, bneg), lb in labels.items():
        for spos in _submasks(bpos):
            for sneg in _submasks(bneg):
                if not (spos | sneg) or (spos == bpos and sneg == bneg):
                    continue
                la = labels[(spos, sneg)]
                if abs(la) == abs(lb) and la != lb:
                    report("consistency", (spos, sneg), (bpos, bneg))

    return AuditReport(
        faces=len(labels),
        violations=_normalized(violations),
        m=ctx.m,
        alpha=ctx.alpha,
        bound_holds=ctx.m >= n,
        n=n,
        t=ctx.t,
        proper=proper,
        extra={"s": s, "defect": ctx.defect},
    )


# -- Z_p faces ---------------------------------------------------------------


@dataclass(frozen=True, order=True)
class ZpFace:
    """``classes[i]`` is the mask of positions carrying class ``i``."""

    n: int
    p: int
    classes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        if len(self.classes) != self.p:
            raise PreconditionError("need one mask per class")
        seen = 0
        for c in self.classes:
            if c & seen:
                raise PreconditionError("two entries share a position")
            seen |= c
        if not seen:
            raise PreconditionError("faces are non-empty")
        if seen >> self.n:
            raise PreconditionError(f"position outside [1, {self.n}]")

    @classmethod
    def of(cls, n: int, p: int, pairs: Sequence[tuple[int, int]]) -> "ZpFace":
        masks = [0] * p
        for c, j in pairs:
            if not 0 <= c < p or not 1 <= j <= n:
                raise PreconditionError(f"bad entry {(c, j)}")
            masks[c] |= 1 << (j - 1)
        if sum(popcount(m) for m in masks) != len(pairs):
            raise PreconditionError("two entries share a position")
        return cls(n, p, tuple(masks))

    @property
    def entries(self) -> tuple[tuple[int, int], ...]:
        """``(class, position)`` pairs sorted by position."""
        out = []
        for c, m in enumerate(self.classes):
            out.extend((c, j) for j in elements_of(m))
        return tuple(sorted(out, key=lambda e: e[1]))

    @property
    def support(self) -> int:
        out = 0
        for m in self.classes:
            out |= m
        return out

    def shift(self, omega: int) -> "ZpFace":
        """Act by ``omega`` in ``Z_p``: every class ``i`` becomes ``i + omega``."""
        p = self.p
        return ZpFace(self.n, p, tuple(self.classes[(i - omega) % p] for i in range(p)))

    def slice(self, i: int) -> int:
        return self.classes[i % self.p]

    def issubset(self, other: "ZpFace") -> bool:
        return all(a & ~b == 0 for a, b in zip(self.classes, other.classes))

    def __len__(self) -> int:
        return popcount(self.support)

    def __repr__(self) -> str:
        return f"ZpFace(p={self.p}, {[list(e) for e in self.entries]})"


def zp_face_count(n: int, p: int) -> int:
    return (p + 1) ** n - 1


def faces_zp(n: int, p: int, max_faces: int = MAX_ZP_FACES) -> Iterator[ZpFace]:
    """Every non-empty Z_p face over ``[n]`` in a fixed order."""
    if n < 1 or p < 2:
        raise PreconditionError("need n >= 1 and p >= 2")
    if zp_face_count(n, p) > max_faces:
        raise GuardExceeded(f"{zp_face_count(n, p)} faces exceed the guard of {max_faces}")
    for labels in product(range(-1, p), repeat=n):
        masks = [0] * p
        for j, c in enumerate(labels):
            if c >= 0:
                masks[c] |= 1 << j
        if any(masks):
            yield ZpFace(n, p, tuple(masks))


def sgn_zp(A: ZpFace) -> int:
    """Class of the entry with the smallest position."""
    low = A.support & -A.support
    for i, m in enumerate(A.classes):
        if m & low:
            return i
    raise InternalInvariantViolation("empty face")


def max_stable_mask(mask: int, s: int) -> int:
    """Largest almost ``s``-stable subset of ``mask`` in the subset order.

    Taking elements greedily from the top gives maximum size, and among
    maximum-size choices it gives the colex-largest one.
    """
    out = 0
    last = None
    for i in range(mask.bit_length() - 1, -1, -1):
        if mask >> i & 1 and (last is None or last - i >= s):
            out |= 1 << i
            last = i
    return out


def max_stable_subface(A: ZpFace, s: int) -> ZpFace:
    """Sub-face with almost ``s``-stable class slices and maximum projection.

    Slices live on disjoint positions, so maximizing size and then the colex
    rank of the union splits into one independent choice per class.
    """
    if s < 1:
        raise PreconditionError("s must be >= 1")
    return ZpFace(A.n, A.p, tuple(max_stable_mask(m, s) for m in A.classes))


@dataclass(frozen=True)
class ZpContext:
    family: Family
    coloring: Coloring
    s: int
    p: int
    defect: int
    alpha1: int
    alpha2: int
    t: int
    m: int
    by_size_asc: tuple[int, ...] = field(repr=False)
    color: dict = field(repr=False, compare=False, hash=False)

    @property
    def alpha(self) -> int:
        return self.alpha1 + self.alpha2

    @property
    def n(self) -> int:
        return self.family.n


def theorem2_alphas(n: int, defect: int, s: int, p: int) -> tuple[int, int]:
    """``alpha1 = (s-1) * floor((n-ecd)/p)`` and ``alpha2 = floor((p-1)(n-ecd+1)/p)``."""
    return (s - 1) * ((n - defect) // p), ((p - 1) * (n - defect + 1)) // p


def zp_context(F: Family, coloring: Coloring, s: int, p: int) -> ZpContext:
    if not is_prime(p):
        raise PreconditionError(f"p={p} is not prime")
    if s < 2:
        raise PreconditionError("s must be >= 2")
    Fs = stable_subfamily(F, s)
    colors = coloring.as_dict()
    missing = [list(elements_of(m)) for m in Fs.masks if m not in colors]
    if missing:
        raise PreconditionError(f"coloring does not cover stable members {missing}")
    d = ecd(F, p)[0]
    a1, a2 = theorem2_alphas(F.n, d, s, p)
    return ZpContext(
        family=F,
        coloring=coloring,
        s=s,
        p=p,
        defect=d,
        alpha1=a1,
        alpha2=a2,
        t=coloring.t,
        m=coloring.t + a1 + a2,
        by_size_asc=tuple(sorted(set(F.masks), key=order_key)),
        color=colors,
    )


def _lambda_zp(classes: tuple[int, ...], ctx: ZpContext) -> tuple[int, int]:
    p, s = ctx.p, ctx.s
    B = [max_stable_mask(m, s) for m in classes]
    for F in ctx.by_size_asc:
        for i, b in enumerate(B):
            if F & ~b == 0:
                c = ctx.color.get(F)
                if c is None:
                    raise InternalInvariantViolation(f"member {list(elements_of(F))} inside a slice is not colored")
                return i, c + ctx.alpha1 + ctx.alpha2
    sizes = [popcount(b) for b in B]
    low_size = min(sizes)
    support = 0
    for m in classes:
        support |= m
    if low_size == max(sizes):
        first = (support & -support).bit_length()
        j = first % (s - 1) or (s - 1)
        index = (s - 1) * (low_size - 1) + j
        if index > ctx.alpha1:
            raise InternalInvariantViolation(f"equal-slice index {index} exceeds alpha1={ctx.alpha1}")
        low = support & -support
        sign = next(i for i, m in enumerate(classes) if m & low)
        return sign, index
    smallest = [i for i, k in enumerate(sizes) if k == low_size]
    h = len(smallest)
    index = (p - 1) * low_size + p - h + ctx.alpha1
    if index > ctx.alpha1 + ctx.alpha2:
        raise InternalInvariantViolation(f"unequal-slice index {index} exceeds alpha1+alpha2={ctx.alpha}")
    return (pow(h, -1, p) * sum(smallest)) % p, index


def lambda_zp(A: ZpFace, ctx: ZpContext) -> tuple[int, int]:
    """Label ``(class in Z_p, index in 1..m)`` of a Z_p face.

    With ``B`` the maximal stable sub-face:

    * a member inside some slice ``B^i``: the smallest such member gives
      ``(i, color + alpha1 + alpha2)``;
    * all slices of equal size: ``(sgn(A), (s-1)(|B^0|-1) + j)`` where
      ``j`` in ``1..s-1`` is the residue of the smallest position;
    * otherwise, with ``h`` classes of minimum slice size:
      ``(h^-1 * sum of those classes, (p-1) * min size + p - h + alpha1)``.
    """
    if A.n != ctx.n or A.p != ctx.p:
        raise PreconditionError("face and context disagree on n or p")
    return _lambda_zp(A.classes, ctx)


def _zp_face_json(n: int, p: int, classes) -> list[list[int]]:
    return [list(e) for e in ZpFace(n, p, classes).entries]


def audit_zptucker(
    F: Family,
    coloring: Coloring,
    s: int,
    p: int,
    labels=None,
    max_violations: int = 100,
    max_faces: int = MAX_ZP_FACES,
) -> AuditReport:
    """Check equivariance and both Z_p-Tucker conditions over every face.

    Condition 1: ``A1 <= A2`` with equal index ``<= alpha`` share a class.
    Condition 2: no chain ``A1 <= ... <= Ap`` with equal index ``> alpha``
    carries ``p`` pairwise distinct classes.
    """
    n = F.n
    if zp_face_count(n, p) > max_faces:
        raise GuardExceeded(f"{zp_face_count(n, p)} faces exceed the guard of {max_faces}")
    ctx = zp_context(F, coloring, s, p)
    Fs = stable_subfamily(F, s)
    proper = is_proper(Fs, Coloring(Fs, tuple(ctx.color[m] for m in Fs.masks), coloring.t), p) if len(Fs) else True
    alpha = ctx.alpha

    if labels is None:
        labels = {A.classes: _lambda_zp(A.classes, ctx) for A in faces_zp(n, p, max_faces)}
    violations: list[dict] = []

    def report(kind: str, *faces) -> None:
        if len(violations) < max_violations:
            violations.append({"kind": kind, "faces": [_zp_face_json(n, p, f) for f in faces]})

    def shifted(classes, omega):
        return tuple(classes[(i - omega) % p] for i in range(p))

    def subfaces(classes):
        # every sub-face: drop any subset of the occupied positions
        occupied = [(i, 1 << j) for i, m in enumerate(classes) for j in range(n) if m >> j & 1]
        k = len(occupied)
        for keep in range(1, 1 << k):
            if keep == (1 << k) - 1:
                continue
            out = [0] * p
            for b in range(k):
                if keep >> b & 1:
                    i, bit = occupied[b]
                    out[i] |= bit
            yield tuple(out)

    for classes, (l1, l2) in labels.items():
        if not 1 <= l2 <= ctx.m or not 0 <= l1 < p:
            report("range", classes)
        for omega in range(1, p):
            g1, g2 = labels[shifted(classes, omega)]
            if g1 != (l1 + omega) % p or g2 != l2:
                report("equivariance", classes)
                break

    by_size = sorted(labels, key=lambda c: sum(popcount(m) for m in c))
    # chain label sets per face, for condition 2
    reach: dict[tuple, dict[frozenset, tuple | None]] = {}
    for classes in by_size:
        l1, l2 = labels[classes]
        here: dict[frozenset, tuple | None] = {frozenset([l1]): None}
        for sub in subfaces(classes):
            m1, m2 = labels[sub]
            if m2 != l2:
                continue
            if l2 <= alpha:
                if m1 != l1:
                    report("condition1", sub, classes)
                continue
            for labset in reach[sub]:
                if l1 not in labset:
                    grown = labset | {l1}
                    if grown not in here:
                        here[grown] = (sub, labset)
        if l2 > alpha:
            reach[classes] = here
            for labset in here:
                if len(labset) == p:
                    chain = [classes]
                    cur, cur_set = classes, labset
                    while reach[cur][cur_set] is not None:
                        cur, cur_set = reach[cur][cur_set]
                        chain.append(cur)
                    report("condition2", *reversed(chain))

    return AuditReport(
        faces=len(labels),
        violations=_normalized(violations),
        m=ctx.m,
        alpha=alpha,
        bound_holds=alpha + (p - 1) * (ctx.m - alpha) >= n,
        n=n,
        t=ctx.t,
        proper=proper,
        extra={"s": s, "p": p, "alpha1": ctx.alpha1, "alpha2": ctx.alpha2, "defect": ctx.defect},
    )
