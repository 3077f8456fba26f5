"""The Kneser hypergraph KG^r(F), kept implicit.

Vertices are the members of a family, and an edge is any ``r`` pairwise
disjoint members.  A coloring is proper when no color class holds ``r``
pairwise disjoint members.  Edges are never materialized by the solver;
properness is decided per color class with a small set-packing search.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .core import Family, GuardExceeded, InternalInvariantViolation, PreconditionError, elements_of, popcount


@dataclass(frozen=True)
class Coloring:
    """Colors ``1..t`` aligned with ``family.masks``."""

    family: Family
    colors: tuple[int, ...]
    t: int

    def __post_init__(self):
        object.__setattr__(self, "colors", tuple(self.colors))
        if len(self.colors) != len(self.family):
            raise PreconditionError("coloring must cover every member of the family")
        for c in self.colors:
            if not 1 <= c <= self.t:
                raise PreconditionError(f"color {c} outside 1..{self.t}")

    @classmethod
    def from_colors(cls, family: Family, colors: Sequence[int]) -> "Coloring":
        return cls(family, tuple(colors), max(colors, default=0))

    def color_of(self, mask: int) -> int:
        return self.colors[self.family.masks.index(mask)]

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.family.masks, self.colors))

    def classes(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for i, c in enumerate(self.colors):
            out.setdefault(c, []).append(i)
        return out

    def relabel(self, perm: dict[int, int]) -> "Coloring":
        return Coloring(self.family, tuple(perm[c] for c in self.colors), self.t)

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "colors": {json.dumps(list(elements_of(m))): c for m, c in zip(self.family.masks, self.colors)},
        }

    @classmethod
    def from_json(cls, family: Family, data: dict) -> "Coloring":
        lookup = {}
        for key, c in data["colors"].items():
            m = 0
            for e in json.loads(key):
                m |= 1 << (e - 1)
            lookup[m] = c
        missing = [list(elements_of(m)) for m in family.masks if m not in lookup]
        if missing:
            raise PreconditionError(f"coloring misses members {missing}")
        return cls(family, tuple(lookup[m] for m in family.masks), data["t"])


def find_packing(masks: Sequence[int], r: int, universe: int | None = None) -> tuple[int, ...] | None:
    """Indices of ``r`` pairwise disjoint masks, or None.

    Members are tried by ascending size; a branch is cut when the free part
    of the universe cannot host the smallest remaining sizes.
    """
    if r <= 0:
        return ()
    if len(masks) < r:
        return None
    order = sorted(range(len(masks)), key=lambda i: (popcount(masks[i]), masks[i]))
    sizes = [popcount(masks[i]) for i in order]
    if universe is None:
        universe = 0
        for m in masks:
            universe |= m
    free_total = popcount(universe)
    chosen: list[int] = []

    def rec(start: int, used: int, need: int) -> bool:
        if need == 0:
            return True
        free = free_total - popcount(used)
        for pos in range(start, len(order) - need + 1):
            # sizes ascending: the cheapest completion from here on
            if sum(sizes[pos:pos + need]) > free:
                return False
            m = masks[order[pos]]
            if m & used:
                continue
            chosen.append(order[pos])
            if rec(pos + 1, used | m, need - 1):
                return True
            chosen.pop()
        return False

    if rec(0, 0, r):
        return tuple(sorted(chosen))
    return None


def find_monochromatic_edge(F: Family, coloring: Coloring, r: int) -> tuple[int, ...] | None:
    """Member indices of ``r`` disjoint same-colored members, or None."""
    if r < 2:
        raise PreconditionError("r must be >= 2")
    if coloring.family != F:
        raise PreconditionError("coloring belongs to a different family")
    for c in sorted(coloring.classes()):
        idx = coloring.classes()[c]
        hit = find_packing([F.masks[i] for i in idx], r)
        if hit is not None:
            return tuple(idx[i] for i in hit)
    return None


def is_proper(F: Family, coloring: Coloring, r: int) -> bool:
    return find_monochromatic_edge(F, coloring, r) is None


def edges(F: Family, r: int, max_edges: int = 100_000) -> list[tuple[int, ...]]:
    """Every edge as a sorted tuple of member indices.

    Raises :class:`GuardExceeded` once more than ``max_edges`` edges exist.
    """
    if r < 2:
        raise PreconditionError("r must be >= 2")
    out: list[tuple[int, ...]] = []
    masks = F.masks

    def rec(start: int, used: int, picked: list[int]) -> None:
        if len(picked) == r:
            out.append(tuple(picked))
            if len(out) > max_edges:
                raise GuardExceeded(f"more than {max_edges} edges (counted {len(out)} so far)")
            return
        for i in range(start, len(masks)):
            if masks[i] & used == 0:
                picked.append(i)
                rec(i + 1, used | masks[i], picked)
                picked.pop()

    rec(0, 0, [])
    return out


def greedy_min_element_coloring(F: Family) -> Coloring:
    """Color each member by its minimum element, relabelled to ``1..t``."""
    if not len(F):
        raise PreconditionError("family is empty")
    minima = [(m & -m).bit_length() for m in F.masks]
    rank = {v: i + 1 for i, v in enumerate(sorted(set(minima)))}
    return Coloring(F, tuple(rank[v] for v in minima), len(rank))


class _Solver:
    """DSATUR-style backtracking for t-colorings of KG^r(F)."""

    def __init__(self, F: Family, r: int):
        self.F = F
        self.r = r
        self.masks = F.masks
        nv = len(self.masks)
        self.nv = nv
        # adj[v]: bitset over vertex indices of members disjoint from v
        self.adj = [0] * nv
        for i in range(nv):
            for j in range(i + 1, nv):
                if self.masks[i] & self.masks[j] == 0:
                    self.adj[i] |= 1 << j
                    self.adj[j] |= 1 << i
        self.degree = [popcount(a) for a in self.adj]
        self.nodes = 0

    def _blocks(self, v: int, cls: int) -> bool:
        """Would adding ``v`` to the class ``cls`` create a monochromatic edge?"""
        cand = cls & self.adj[v]
        if not cand:
            return False
        if self.r == 2:
            return True
        idx = [i for i in range(self.nv) if cand >> i & 1]
        return find_packing([self.masks[i] for i in idx], self.r - 1) is not None

    def color(self, t: int, node_limit: int | None = None) -> list[int] | None:
        nv = self.nv
        colors = [-1] * nv
        classes: list[int] = []

        def rec(remaining: int) -> bool:
            if remaining == 0:
                return True
            self.nodes += 1
            if node_limit is not None and self.nodes > node_limit:
                raise GuardExceeded(f"solver node limit {node_limit} reached")
            best = -1
            best_key = None
            best_free: list[int] = []
            for v in range(nv):
                if colors[v] != -1:
                    continue
                free = [c for c in range(len(classes)) if not self._blocks(v, classes[c])]
                nfree = len(free) + (1 if len(classes) < t else 0)
                if nfree == 0:
                    return False
                key = (len(classes) - len(free), self.degree[v])
                if best_key is None or key > best_key:
                    best, best_key, best_free = v, key, free
            v = best
            bit = 1 << v
            for c in best_free:
                colors[v] = c
                classes[c] |= bit
                if rec(remaining - 1):
                    return True
                classes[c] ^= bit
            if len(classes) < t:
                colors[v] = len(classes)
                classes.append(bit)
                if rec(remaining - 1):
                    return True
                classes.pop()
            colors[v] = -1
            return False

        if rec(nv):
            return [c + 1 for c in colors]
        return None


def _greedy_upper_bound(solver: _Solver) -> list[int]:
    nv = solver.nv
    colors = [-1] * nv
    classes: list[int] = []
    for _ in range(nv):
        best, best_key, best_free = -1, None, None
        for v in range(nv):
            if colors[v] != -1:
                continue
            free = [c for c in range(len(classes)) if not solver._blocks(v, classes[c])]
            key = (len(classes) - len(free), solver.degree[v])
            if best_key is None or key > best_key:
                best, best_key, best_free = v, key, free
        c = best_free[0] if best_free else len(classes)
        if c == len(classes):
            classes.append(0)
        classes[c] |= 1 << best
        colors[best] = c
    return [c + 1 for c in colors]


def chromatic_number(F: Family, r: int, node_limit: int | None = None) -> tuple[int, Coloring]:
    """Exact chromatic number of KG^r(F) with a deterministic optimal coloring.

    Starts from a greedy coloring and tightens ``t`` until the search proves
    ``t - 1`` colors impossible; the witness is then re-derived at the optimum
    so it does not depend on the greedy start.
    """
    if r < 2:
        raise PreconditionError("r must be >= 2")
    if not len(F):
        raise PreconditionError("chromatic number of an empty vertex set is not defined here")
    if find_packing(F.masks, r) is None:
        return 1, Coloring(F, (1,) * len(F), 1)
    solver = _Solver(F, r)
    greedy = _greedy_upper_bound(solver)
    chi = max(greedy)
    t = chi - 1
    while t >= 2:
        if solver.color(t, node_limit) is None:
            break
        chi = t
        t -= 1
    witness = solver.color(chi, node_limit)
    if witness is None:
        raise InternalInvariantViolation(f"no {chi}-coloring found on re-derivation")
    coloring = Coloring(F, tuple(witness), chi)
    if not is_proper(F, coloring, r):
        raise InternalInvariantViolation("solver returned an improper coloring")
    return chi, coloring


def is_colorable(F: Family, r: int, t: int, node_limit: int | None = None) -> Coloring | None:
    """A proper ``t``-coloring of KG^r(F) if one exists."""
    if not len(F):
        return Coloring(F, (), max(t, 0))
    if t < 1:
        return None
    found = _Solver(F, r).color(t, node_limit)
    return None if found is None else Coloring(F, tuple(found), t)


def disjointness_degree(F: Family) -> list[int]:
    return [sum(1 for o in F.masks if o & m == 0) for m in F.masks]


def all_monochromatic_edges(F: Family, coloring: Coloring, r: int) -> list[tuple[int, ...]]:
    """Brute-force list of monochromatic edges; for diagnostics on small families."""
    out = []
    for idx in combinations(range(len(F)), r):
        if len({coloring.colors[i] for i in idx}) != 1:
            continue
        used = 0
        ok = True
        for i in idx:
            if F.masks[i] & used:
                ok = False
                break
            used |= F.masks[i]
        if ok:
            out.append(idx)
    return out
