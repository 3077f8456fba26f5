"""Slow, independent reference implementations used only by the tests.

Everything here works on plain Python sets and tuples and shares no search
code with the package.
"""

from itertools import chain, combinations, product


def powerset(items):
    items = list(items)
    return chain.from_iterable(combinations(items, k) for k in range(len(items) + 1))


def almost_stable(S, s):
    return all(abs(i - j) >= s for i, j in combinations(S, 2))


def cyclic_stable(S, n, s):
    return all(s <= abs(i - j) <= n - s for i, j in combinations(S, 2))


def ecd_bruteforce(n, sets, r):
    """Label every element with 0 (removed) or a part 1..r and keep the best."""
    members = [frozenset(m) for m in sets]
    best = None
    for labels in product(range(r + 1), repeat=n):
        removed = labels.count(0)
        if best is not None and removed >= best:
            continue
        parts = [frozenset(e + 1 for e in range(n) if labels[e] == i) for i in range(1, r + 1)]
        sizes = [len(p) for p in parts]
        if max(sizes) - min(sizes) > 1:
            continue
        if any(m <= p for m in members for p in parts):
            continue
        best = removed
    return best


def hyperedges(sets, r):
    members = [frozenset(m) for m in sets]
    out = []
    for idx in combinations(range(len(members)), r):
        if all(not (members[a] & members[b]) for a, b in combinations(idx, 2)):
            out.append(idx)
    return out


def set_partitions(k):
    """Restricted growth strings of length ``k``: one per partition of ``range(k)``."""
    if k == 0:
        yield ()
        return

    def rec(prefix, top):
        if len(prefix) == k:
            yield tuple(prefix)
            return
        for c in range(top + 2):
            yield from rec(prefix + [c], max(top, c))

    yield from rec([0], 0)


def chi_bruteforce(sets, r):
    """Fewest blocks over every partition of the vertices with no monochromatic edge."""
    es = hyperedges(sets, r)
    best = None
    for rgs in set_partitions(len(sets)):
        blocks = max(rgs) + 1 if rgs else 0
        if best is not None and blocks >= best:
            continue
        if any(len({rgs[i] for i in e}) == 1 for e in es):
            continue
        best = blocks
    return best


def alt_bruteforce(entries):
    """Largest alternating subset by (size, colex of absolute values)."""
    best, best_key = None, None
    for sub in powerset(entries):
        if not sub:
            continue
        srt = sorted(sub, key=abs)
        if any(a * b > 0 for a, b in zip(srt, srt[1:])):
            continue
        absvals = sorted(abs(x) for x in srt)
        key = (len(absvals), sorted(absvals, reverse=True))
        if best_key is None or key > best_key:
            best, best_key = frozenset(sub), key
    return best


def max_stable_bruteforce(positions, s):
    """Largest almost s-stable subset of ``positions`` by (size, colex)."""
    best, best_key = frozenset(), (0, [])
    for sub in powerset(sorted(positions)):
        if not almost_stable(sub, s):
            continue
        key = (len(sub), sorted(sub, reverse=True))
        if key > best_key:
            best, best_key = frozenset(sub), key
    return best


def lambda_zp_reference(pairs, n, p, s, sets, color, alpha1, alpha2):
    """Z_p label computed straight from the case analysis with brute-force slices."""
    slices = {i: max_stable_bruteforce([j for c, j in pairs if c == i], s) for i in range(p)}
    fams = sorted((frozenset(m) for m in sets), key=lambda m: (len(m), sorted(m, reverse=True)))
    for F in fams:
        for i in range(p):
            if F <= slices[i]:
                return i, color[F] + alpha1 + alpha2
    sizes = [len(slices[i]) for i in range(p)]
    first = min(j for _, j in pairs)
    if len(set(sizes)) == 1:
        j = first % (s - 1)
        if j == 0:
            j = s - 1
        sign = next(c for c, pos in pairs if pos == first)
        return sign, (s - 1) * (sizes[0] - 1) + j
    low = min(sizes)
    cls = [i for i in range(p) if sizes[i] == low]
    h = len(cls)
    hinv = next(x for x in range(1, p) if (h * x) % p == 1)
    return (hinv * sum(cls)) % p, (p - 1) * low + p - h + alpha1
