"""Subsets of [n] as bit sets, stability predicates and families.

Element ``i`` of ``[n]`` is stored in bit ``i - 1``.  With that encoding the
colexicographic order on equal-size sets coincides with integer order on the
masks, so the shared subset order is simply ``(popcount, mask)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

MAX_N = 64


class PreconditionError(ValueError):
    """An argument violates an operation's documented precondition."""


class GuardExceeded(RuntimeError):
    """An enumeration or search guard (size, edge count, budget) was hit."""


class InternalInvariantViolation(RuntimeError):
    """A computed object contradicts a proven statement. Always a bug."""


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << (e - 1)
    return m


def elements_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def order_key(mask: int) -> tuple[int, int]:
    """Sort key of the global subset order: size first, then colex."""
    return (popcount(mask), mask)


def _check_n(n: int) -> None:
    if not isinstance(n, int) or n < 0 or n > MAX_N:
        raise PreconditionError(f"ground size must be an integer in 0..{MAX_N}, got {n!r}")


@dataclass(frozen=True)
class Subset:
    """A subset of ``[n]``; ``mask`` is the bit-set encoding."""

    n: int
    mask: int

    def __post_init__(self):
        _check_n(self.n)
        if self.mask < 0 or self.mask >> self.n:
            raise PreconditionError(f"mask {self.mask:#x} has elements outside [1, {self.n}]")

    @classmethod
    def of(cls, n: int, elements: Iterable[int]) -> "Subset":
        elements = list(elements)
        if len(set(elements)) != len(elements):
            raise PreconditionError(f"repeated element in {elements}")
        for e in elements:
            if not isinstance(e, int) or not 1 <= e <= n:
                raise PreconditionError(f"element {e!r} outside [1, {n}]")
        return cls(n, mask_of(elements))

    @classmethod
    def full(cls, n: int) -> "Subset":
        return cls(n, (1 << n) - 1)

    @property
    def elements(self) -> tuple[int, ...]:
        return elements_of(self.mask)

    def __len__(self) -> int:
        return popcount(self.mask)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __contains__(self, e: int) -> bool:
        return 1 <= e <= self.n and bool(self.mask >> (e - 1) & 1)

    def issubset(self, other: "Subset") -> bool:
        return self.mask & ~other.mask == 0

    def __lt__(self, other: "Subset") -> bool:
        return subset_compare(self, other) < 0

    def __repr__(self) -> str:
        return f"Subset({self.n}, {set(self.elements) or '{}'})"


def subset_compare(a: Subset, b: Subset) -> int:
    """Return -1, 0 or 1 comparing ``a`` and ``b`` by size, then colex."""
    if a.n != b.n:
        raise PreconditionError("subsets over different ground sets are not comparable")
    ka, kb = order_key(a.mask), order_key(b.mask)
    return (ka > kb) - (ka < kb)


def almost_stable_mask(mask: int, s: int) -> bool:
    """Consecutive elements of ``mask`` are at least ``s`` apart."""
    if s <= 1:
        return True
    # i and i + d both present for some 1 <= d < s  <=>  mask & (mask >> d) != 0
    for d in range(1, s):
        if mask & (mask >> d):
            return False
    return True


def stable_mask(mask: int, n: int, s: int) -> bool:
    if not almost_stable_mask(mask, s):
        return False
    if mask == 0:
        return True
    lo = (mask & -mask).bit_length()
    hi = mask.bit_length()
    return hi - lo <= n - s or mask & (mask - 1) == 0


def is_almost_s_stable(S: Subset, s: int) -> bool:
    if s < 1:
        raise PreconditionError("s must be >= 1")
    return almost_stable_mask(S.mask, s)


def is_s_stable(S: Subset, s: int) -> bool:
    """Pairwise ``s <= |i - j| <= n - s``, i.e. cyclic gaps of at least ``s``."""
    if s < 1:
        raise PreconditionError("s must be >= 1")
    return stable_mask(S.mask, S.n, s)


@dataclass(frozen=True)
class Family:
    """A finite family of distinct non-empty subsets of ``[n]``.

    ``masks`` keeps the insertion order; that order is the member index used
    by colorings and edges.
    """

    n: int
    masks: tuple[int, ...]

    def __post_init__(self):
        _check_n(self.n)
        object.__setattr__(self, "masks", tuple(self.masks))
        seen = set()
        for m in self.masks:
            if m <= 0:
                raise PreconditionError("families contain non-empty subsets only")
            if m >> self.n:
                raise PreconditionError(f"member {elements_of(m)} outside [1, {self.n}]")
            if m in seen:
                raise PreconditionError(f"duplicate member {list(elements_of(m))}")
            seen.add(m)

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> "Family":
        return cls(n, tuple(Subset.of(n, s).mask for s in sets))

    @classmethod
    def from_masks(cls, n: int, masks: Iterable[int], dedupe: bool = True) -> "Family":
        masks = list(masks)
        if dedupe:
            masks = list(dict.fromkeys(masks))
        return cls(n, tuple(masks))

    @property
    def members(self) -> tuple[Subset, ...]:
        return tuple(Subset(self.n, m) for m in self.masks)

    def __len__(self) -> int:
        return len(self.masks)

    def __iter__(self) -> Iterator[Subset]:
        return iter(self.members)

    def __contains__(self, S: Subset) -> bool:
        return S.n == self.n and S.mask in set(self.masks)

    def index(self, S: Subset | int) -> int:
        mask = S if isinstance(S, int) else S.mask
        return self.masks.index(mask)

    def as_sets(self) -> list[list[int]]:
        return [list(elements_of(m)) for m in self.masks]

    def canonical(self) -> "Family":
        """Same family with members sorted by the subset order."""
        return Family(self.n, tuple(sorted(self.masks, key=order_key)))

    def to_json(self) -> dict:
        return {"n": self.n, "sets": self.as_sets()}

    def __repr__(self) -> str:
        return f"Family(n={self.n}, sets={self.as_sets()})"


def stable_subfamily(F: Family, s: int, mode: str = "almost") -> Family:
    """Members of ``F`` that are almost ``s``-stable (``mode="almost"``)
    or ``s``-stable (``mode="cyclic"``)."""
    if s < 1:
        raise PreconditionError("s must be >= 1")
    if mode == "almost":
        keep = [m for m in F.masks if almost_stable_mask(m, s)]
    elif mode == "cyclic":
        keep = [m for m in F.masks if stable_mask(m, F.n, s)]
    else:
        raise PreconditionError(f"unknown stability mode {mode!r}")
    return Family(F.n, tuple(keep))


def complete_k_family(n: int, k: int) -> Family:
    """All ``k``-subsets of ``[n]`` in colex order."""
    if not 1 <= k <= n:
        raise PreconditionError(f"need 1 <= k <= n, got n={n}, k={k}")
    _check_n(n)
    masks = sorted((mask_of(c) for c in combinations(range(1, n + 1), k)))
    return Family(n, tuple(masks))


def compress(mask: int, X: int) -> int:
    """Image of ``mask`` (a subset of ``X``) under the order-preserving map ``X -> [|X|]``."""
    out = 0
    bit = 0
    i = 0
    while X >> i:
        if X >> i & 1:
            if mask >> i & 1:
                out |= 1 << bit
            bit += 1
        i += 1
    return out


def expand(mask: int, X: int) -> int:
    """Inverse of :func:`compress`: send a subset of ``[|X|]`` back into ``X``."""
    out = 0
    bit = 0
    i = 0
    while X >> i:
        if X >> i & 1:
            if mask >> bit & 1:
                out |= 1 << i
            bit += 1
        i += 1
    return out


def restrict(F: Family, X: Subset | int) -> Family:
    """``F|_X``: members inside ``X``, relabelled onto ``[|X|]`` keeping order."""
    Xm = X if isinstance(X, int) else X.mask
    if isinstance(X, Subset) and X.n > F.n:
        raise PreconditionError("X is not a subset of the ground set")
    if Xm >> F.n:
        raise PreconditionError("X is not a subset of the ground set")
    kept = [compress(m, Xm) for m in F.masks if m & ~Xm == 0]
    return Family.from_masks(popcount(Xm), kept)


def sorted_masks(masks: Sequence[int], reverse: bool = False) -> list[int]:
    return sorted(masks, key=order_key, reverse=reverse)


def load_family(path: str) -> Family:
    """Read a family from ``{"n": int, "sets": [[...], ...]}``.

    Duplicates, empty sets and out-of-range elements raise
    :class:`PreconditionError`.
    """
    with open(path) as fh:
        data = json.load(fh)
    return family_from_json(data)


def family_from_json(data) -> Family:
    if not isinstance(data, dict) or "n" not in data or "sets" not in data:
        raise PreconditionError('family JSON must be an object with "n" and "sets"')
    n = data["n"]
    if not isinstance(n, int) or n < 1:
        raise PreconditionError(f'"n" must be a positive integer, got {n!r}')
    seen = {}
    masks = []
    for pos, s in enumerate(data["sets"]):
        if not isinstance(s, list) or not s:
            raise PreconditionError(f"set #{pos} must be a non-empty list")
        m = Subset.of(n, s).mask
        if m in seen:
            raise PreconditionError(f"set #{pos} {sorted(s)} duplicates set #{seen[m]}")
        seen[m] = pos
        masks.append(m)
    return Family(n, tuple(masks))
