import random

import pytest

from kneserdefect.core import (
    Family,
    GuardExceeded,
    PreconditionError,
    complete_k_family,
    elements_of,
    mask_of,
    stable_subfamily,
)
from kneserdefect.kneser import Coloring, chromatic_number, greedy_min_element_coloring, is_proper
from kneserdefect.tucker import (
    SignedFace,
    ZpFace,
    alt,
    audit_tucker_z2,
    audit_zptucker,
    faces_z2,
    faces_zp,
    lambda_z2,
    lambda_zp,
    max_stable_subface,
    sgn_z2,
    sgn_zp,
    z2_context,
    zp_context,
)

from oracles import alt_bruteforce, lambda_zp_reference, max_stable_bruteforce


def optimal(F, s, r):
    Fs = stable_subfamily(F, s)
    return chromatic_number(Fs, r)[1]


def test_face_counts():
    assert sum(1 for _ in faces_z2(2)) == 8
    assert [f.entries for f in faces_z2(1)] == [(1,), (-1,)]
    assert sum(1 for _ in faces_zp(2, 3)) == 15
    with pytest.raises(GuardExceeded):
        next(faces_z2(13))
    with pytest.raises(GuardExceeded):
        next(faces_zp(9, 3))


def test_faces_are_distinct_and_valid():
    fs = list(faces_z2(4))
    assert len(set(fs)) == 80
    zs = list(faces_zp(3, 3))
    assert len(set(zs)) == 63


def test_signed_face_rejects_repeated_absolute_value():
    with pytest.raises(PreconditionError):
        SignedFace.of(3, [1, -1])
    with pytest.raises(PreconditionError):
        SignedFace.of(3, [])


@pytest.mark.parametrize(
    "entries, expected",
    [([-1, 2, -3], {-1, 2, -3}), ([1, 2], {2}), ([5], {5})],
)
def test_alt_examples(entries, expected):
    assert set(alt(SignedFace.of(5, entries)).entries) == expected


def test_alt_matches_bruteforce_and_sign():
    for n in range(1, 7):
        for A in faces_z2(n):
            a = alt(A)
            assert set(a.entries) == alt_bruteforce(A.entries)
            assert sgn_z2(A) == (1 if a.entries[0] > 0 else -1)
            assert alt(-A) == -a
            assert sgn_z2(-A) == -sgn_z2(A)


def test_sgn_z2_examples():
    assert sgn_z2(SignedFace.of(3, [-1, 2])) == -1
    assert sgn_z2(SignedFace.of(7, [3, -7])) == 1


def test_lambda_z2_examples():
    F = complete_k_family(4, 2)
    col = optimal(F, 2, 2)
    ctx = z2_context(F, col, 2)
    assert (ctx.alpha, ctx.defect) == (2, 2)
    assert lambda_z2(SignedFace.of(4, [1, -3]), ctx) == 2
    c24 = col.color_of(mask_of([2, 4]))
    assert lambda_z2(SignedFace.of(4, [1, -2, 3, -4]), ctx) == -(c24 + 2)
    for j in range(1, 5):
        assert lambda_z2(SignedFace.of(4, [j]), ctx) == 1


def test_lambda_z2_needs_even_s():
    F = complete_k_family(4, 2)
    with pytest.raises(PreconditionError):
        z2_context(F, optimal(F, 3, 2), 3)


def test_audit_z2_optimal_coloring_is_clean():
    F = complete_k_family(4, 2)
    rep = audit_tucker_z2(F, optimal(F, 2, 2), 2)
    assert rep.ok and rep.faces == 80 and rep.proper and rep.bound_holds


def test_audit_z2_flags_improper_coloring():
    F = complete_k_family(4, 2)
    Fs = stable_subfamily(F, 2)
    bad = Coloring(Fs, (1, 1, 1), 1)
    rep = audit_tucker_z2(F, bad, 2)
    assert not rep.proper
    assert "consistency" in rep.kinds()


def test_audit_z2_single_point():
    F = Family.from_sets(1, [[1]])
    rep = audit_tucker_z2(F, Coloring(F, (1,), 1), 2)
    assert rep.ok and rep.faces == 2


def test_audit_z2_detects_corrupted_label():
    F = complete_k_family(5, 2)
    col = optimal(F, 2, 2)
    ctx = z2_context(F, col, 2)
    labels = {(A.pos, A.neg): lambda_z2(A, ctx) for A in faces_z2(5)}
    key = (0b00001, 0)
    labels[key] = -labels[key]
    rep = audit_tucker_z2(F, col, 2, labels=labels)
    assert "equivariance" in rep.kinds()


def test_sgn_zp_examples():
    assert sgn_zp(ZpFace.of(5, 3, [(2, 5)])) == 2
    assert sgn_zp(ZpFace.of(4, 3, [(0, 1), (2, 4)])) == 0
    for n in range(1, 6):
        for A in faces_zp(n, 3):
            for w in range(3):
                assert sgn_zp(A.shift(w)) == (sgn_zp(A) + w) % 3


def test_max_stable_subface_examples():
    A = ZpFace.of(3, 1, [(0, 1), (0, 2), (0, 3)])
    assert max_stable_subface(A, 2).classes == (mask_of([1, 3]),)
    spread = ZpFace.of(7, 2, [(0, 1), (1, 4), (0, 7)])
    assert max_stable_subface(spread, 3) == spread
    mixed = ZpFace.of(2, 2, [(0, 1), (1, 2)])
    assert max_stable_subface(mixed, 3) == mixed


def test_max_stable_matches_bruteforce():
    for m in range(1, 1 << 10):
        positions = elements_of(m)
        for s in (1, 2, 3, 4):
            got = max_stable_subface(ZpFace(10, 2, (m, 0)), s).classes[0]
            assert set(elements_of(got)) == max_stable_bruteforce(positions, s)


def test_lambda_zp_p2_trace():
    F = complete_k_family(6, 2)
    col = optimal(F, 2, 2)
    ctx = zp_context(F, col, 2, 2)
    assert (ctx.defect, ctx.alpha1, ctx.alpha2) == (4, 1, 1)
    assert lambda_zp(ZpFace.of(6, 2, [(0, 1)]), ctx) == (1, 2)


def test_lambda_zp_matches_reference_and_is_equivariant():
    F = complete_k_family(5, 2)
    col = optimal(F, 2, 3)
    ctx = zp_context(F, col, 2, 3)
    colors = {frozenset(s): c for s, c in zip(col.family.as_sets(), col.colors)}
    for A in faces_zp(5, 3):
        lab = lambda_zp(A, ctx)
        ref = lambda_zp_reference(list(A.entries), 5, 3, 2, F.as_sets(), colors, ctx.alpha1, ctx.alpha2)
        assert lab == ref
        for w in (1, 2):
            l1, l2 = lambda_zp(A.shift(w), ctx)
            assert (l1, l2) == ((lab[0] + w) % 3, lab[1])


def test_lambda_zp_equal_slices_uses_sign():
    F = Family.from_sets(4, [[1, 2, 3, 4]])
    ctx = zp_context(F, Coloring(Family(4, ()), (), 1), 2, 2)
    A = ZpFace.of(4, 2, [(1, 2), (0, 3)])
    assert lambda_zp(A, ctx)[0] == sgn_zp(A) == 1


def test_lambda_zp_bands():
    F = complete_k_family(6, 2)
    ctx = zp_context(F, optimal(F, 2, 3), 2, 3)
    for A in faces_zp(6, 3):
        _, l2 = lambda_zp(A, ctx)
        assert 1 <= l2 <= ctx.m


def test_audit_zp_clean_for_p3():
    F = complete_k_family(5, 2)
    rep = audit_zptucker(F, optimal(F, 2, 3), 2, 3)
    assert rep.ok and rep.faces == 4 ** 5 - 1 and rep.bound_holds


def test_audit_zp_p2_agrees_with_z2():
    F = complete_k_family(5, 2)
    col = optimal(F, 2, 2)
    zp = audit_zptucker(F, col, 2, 2)
    z2 = audit_tucker_z2(F, col, 2)
    assert zp.violations == z2.violations == []


def test_audit_zp_detects_corrupted_label():
    F = complete_k_family(5, 2)
    col = optimal(F, 2, 3)
    ctx = zp_context(F, col, 2, 3)
    labels = {A.classes: lambda_zp(A, ctx) for A in faces_zp(5, 3)}
    key = next(iter(labels))
    l1, l2 = labels[key]
    labels[key] = ((l1 + 1) % 3, l2)
    rep = audit_zptucker(F, col, 2, 3, labels=labels)
    assert rep.violations


def test_audit_zp_flags_improper_coloring():
    F = complete_k_family(6, 2)
    Fs = stable_subfamily(F, 2)
    bad = Coloring(Fs, (1,) * len(Fs), 1)
    rep = audit_zptucker(F, bad, 2, 2)
    assert not rep.proper and rep.violations


def test_zp_context_rejects_composite_p():
    F = complete_k_family(4, 2)
    with pytest.raises(PreconditionError):
        zp_context(F, optimal(F, 2, 2), 2, 4)


def _proper_colorings(F, s, r):
    Fs = stable_subfamily(F, s)
    if not len(Fs):
        return [Coloring(Fs, (), 1)]
    out = [Coloring.from_colors(Fs, range(1, len(Fs) + 1)), chromatic_number(Fs, r)[1]]
    greedy = greedy_min_element_coloring(Fs)
    if is_proper(Fs, greedy, r):
        out.append(greedy)
    return out


def test_audits_clean_for_any_proper_coloring():
    rng = random.Random(2024)
    for _ in range(30):
        n = rng.randint(2, 6)
        F = Family(n, tuple(rng.sample(range(1, 1 << n), rng.randint(1, min(8, (1 << n) - 1)))))
        s = rng.choice([2, 4])
        for col in _proper_colorings(F, s, 2):
            rep = audit_tucker_z2(F, col, s)
            assert rep.ok and rep.bound_holds, rep.violations[:3]
        if n <= 5:
            s = rng.choice([2, 3])
            for col in _proper_colorings(F, s, 3):
                rep = audit_zptucker(F, col, s, 3)
                assert rep.ok and rep.bound_holds, rep.violations[:3]
