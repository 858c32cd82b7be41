"""Bohr sets: exact realization against a high-precision oracle, chord
comparators, size bounds, dilate regularity, and measure smoothing."""

from fractions import Fraction

import mpmath
import numpy as np
import pytest
from conftest import rng_for

from vcgrp.bohr import (
    BohrError,
    BohrSpec,
    dilate,
    find_regular_dilate,
    is_regular,
    realize,
    regularity_defect,
    regularity_violations,
    size_lower_bound_check,
    smoothing_check,
    smoothing_l1,
    subgroup_inside,
)
from vcgrp.exactmath import chord_sq_cmp, cmp_rational_times_pi_pow, max_chord_index
from vcgrp.groups import CyclicProductGroup, cyclic, is_subgroup, symmetric_group
from vcgrp.sets import GSet

mpmath.mp.dps = 60


def _chord_mp(a, L):
    return 2 * mpmath.sin(mpmath.pi * a / L)


def _brute_bohr_members(g, freqs, rho: Fraction):
    """Membership by 60-digit floating evaluation; asserts no near-ties."""
    rho_mp = mpmath.mpf(rho.numerator) / rho.denominator
    mask = np.zeros(g.order, dtype=bool)
    for x in range(g.order):
        ok = True
        for gm in freqs:
            diff = _chord_mp(g.char_rootnum(gm, x), g.exponent) - rho_mp
            assert abs(diff) > mpmath.mpf(10) ** -40 or diff == 0
            if diff > 0:
                ok = False
                break
        mask[x] = ok
    return mask


# ---------------------------------------------------------------------------
# exact chord arithmetic


def test_chord_sq_cmp_exact_ties():
    # chord^2(e) = 2 - 2 cos(2 pi e / L): rational exactly at 0, L/6, L/4, L/3, L/2
    assert chord_sq_cmp(0, 12, Fraction(0)) == 0
    assert chord_sq_cmp(2, 12, Fraction(1)) == 0  # chord(L/6) = 1
    assert chord_sq_cmp(3, 12, Fraction(2)) == 0  # chord(L/4) = sqrt(2)
    assert chord_sq_cmp(4, 12, Fraction(3)) == 0  # chord(L/3) = sqrt(3)
    assert chord_sq_cmp(6, 12, Fraction(4)) == 0  # chord(L/2) = 2
    assert chord_sq_cmp(2, 12, Fraction(9, 10)) == 1
    assert chord_sq_cmp(2, 12, Fraction(11, 10)) == -1


def test_chord_sq_cmp_matches_high_precision():
    rng = rng_for(9200)
    for L in (5, 7, 12, 30, 401):
        for e in range(0, L // 2 + 1, max(1, L // 10)):
            q = Fraction(int(rng.integers(0, 50)), int(rng.integers(1, 12)))
            want = _chord_mp(e, L) ** 2 - (mpmath.mpf(q.numerator) / q.denominator)
            got = chord_sq_cmp(e, L, q)
            if abs(want) > mpmath.mpf(10) ** -40:
                assert got == (1 if want > 0 else -1), (L, e, q)
            else:
                assert got == 0


def test_max_chord_index_is_the_threshold():
    for L in (5, 8, 12, 30):
        for q in (Fraction(0), Fraction(1, 3), Fraction(1), Fraction(2), Fraction(3), Fraction(4), Fraction(9, 2)):
            e = max_chord_index(L, q)
            assert 0 <= e <= L // 2
            assert chord_sq_cmp(e, L, q) <= 0
            if e < L // 2:
                assert chord_sq_cmp(e + 1, L, q) > 0


def test_cmp_rational_times_pi_pow():
    # sign of a * pi^d - b
    assert cmp_rational_times_pi_pow(Fraction(1), 0, Fraction(1)) == 0
    assert cmp_rational_times_pi_pow(Fraction(1), 0, Fraction(2)) == -1
    assert cmp_rational_times_pi_pow(Fraction(1), 1, Fraction(355, 113)) == -1
    assert cmp_rational_times_pi_pow(Fraction(1), 1, Fraction(314159, 100000)) == 1
    assert cmp_rational_times_pi_pow(Fraction(1), 2, Fraction(98696, 10000)) == 1
    assert cmp_rational_times_pi_pow(Fraction(1), 2, Fraction(98697, 10000)) == -1
    assert cmp_rational_times_pi_pow(Fraction(0), 3, Fraction(-1)) == 1


# ---------------------------------------------------------------------------
# spec construction


def test_spec_normalization():
    g = CyclicProductGroup([3, 4])
    spec = BohrSpec(g, [1, 1, [1, 0], 0, g.identity], Fraction(1, 2))
    # [1,0] is coordinate form of index 1; identity dropped; duplicates merged
    assert spec.freqs == (1,)
    assert spec.rank == 1
    assert BohrSpec(g, [], "2/3").radius == Fraction(2, 3)
    with pytest.raises(BohrError):
        BohrSpec(g, [1], Fraction(-1, 2))
    with pytest.raises(BohrError):
        BohrSpec(symmetric_group(3), [1], Fraction(1, 2))


def test_realize_known_values():
    g = cyclic(12)
    # chord(D) <= 1 iff D <= 2, so B({1}, 1) = {x : min(x, 12-x) <= 2}
    assert realize(BohrSpec(g, [1], 1)).indices.tolist() == [0, 1, 2, 10, 11]
    assert realize(BohrSpec(g, [1], "999/1000")).indices.tolist() == [0, 1, 11]
    assert realize(BohrSpec(g, [1], 2)).card == 12
    assert realize(BohrSpec(g, [], Fraction(1, 10))).card == 12  # rank 0
    assert realize(BohrSpec(g, [1], 0)).indices.tolist() == [0]


def test_realize_matches_high_precision_oracle():
    rng = rng_for(9201)
    cases = [
        (CyclicProductGroup([12]), [1]),
        (CyclicProductGroup([30]), [1, 7]),
        (CyclicProductGroup([3, 4]), [2, 5]),
        (CyclicProductGroup([401]), [1, 20]),
        (CyclicProductGroup([5, 5, 2]), [3, 11]),
    ]
    for g, freqs in cases:
        for _ in range(3):
            rho = Fraction(int(rng.integers(1, 30)), int(rng.integers(15, 40)))
            got = realize(BohrSpec(g, freqs, rho))
            want = _brute_bohr_members(g, freqs, rho)
            assert got.mask.tolist() == want.tolist(), (g.describe(), freqs, rho)


def test_identity_always_member_and_symmetry():
    g = CyclicProductGroup([7, 3])
    spec = BohrSpec(g, [1, 5], Fraction(1, 4))
    B = realize(spec)
    assert 0 in B.indices.tolist()
    assert B == B.inverse()  # |gamma(-x) - 1| = |gamma(x) - 1|


def test_dilate_scales_radius():
    g = cyclic(30)
    spec = BohrSpec(g, [1], Fraction(1, 3))
    half = dilate(spec, "1/2")
    assert half.radius == Fraction(1, 6)
    assert half.freqs == spec.freqs
    assert realize(half).issubset(realize(spec))
    assert dilate(spec, 0).radius == 0
    with pytest.raises(BohrError):
        dilate(spec, Fraction(-1, 2))


def test_subgroup_inside_is_annihilator():
    g = CyclicProductGroup([4, 3])
    spec = BohrSpec(g, [3], Fraction(1, 5))  # freq (3,0): annihilates x with 3*x0 = 0 mod 4...
    perp = subgroup_inside(spec)
    assert is_subgroup(g, perp.indices)
    assert perp == realize(BohrSpec(g, spec.freqs, 0))
    # every Bohr set contains the annihilator of its frequencies
    assert perp.issubset(realize(spec))
    assert subgroup_inside(BohrSpec(g, [], Fraction(1, 2))).card == g.order


# ---------------------------------------------------------------------------
# size lower bound


def test_size_bound_provable_variant_always_holds():
    rng = rng_for(9202)
    for g, freqs in [
        (CyclicProductGroup([24]), [1]),
        (CyclicProductGroup([8]), [1]),
        (CyclicProductGroup([5, 5]), [1, 6]),
        (CyclicProductGroup([401]), [17]),
    ]:
        for _ in range(4):
            rho = Fraction(int(rng.integers(1, 20)), 20)
            rep = size_lower_bound_check(BohrSpec(g, freqs, rho))
            assert rep["provable_pass"], (g.describe(), freqs, rho)
            assert rep["size"] == realize(BohrSpec(g, freqs, rho)).card
            # the stated bound, when it holds, is consistent with the floats
            if rep["pass"]:
                assert rep["size"] >= rep["bound"] - 1e-9


def test_size_bound_stated_constant_fails_on_z8():
    # |B({1}, 1)| = 3 in Z/8 but (2 rho / pi)^1 * 8 = 16/pi > 5: the stated
    # inequality is genuinely false, and the check reports rather than raises.
    rep = size_lower_bound_check(BohrSpec(cyclic(8), [1], 1))
    assert rep["size"] == 3
    assert not rep["pass"]
    assert rep["provable_pass"]
    assert abs(rep["bound"] - 16 / 3.141592653589793) < 1e-9


def test_size_bound_radius_validation():
    with pytest.raises(BohrError):
        size_lower_bound_check(BohrSpec(cyclic(8), [1], Fraction(3, 2)))


# ---------------------------------------------------------------------------
# regularity


def test_regular_iff_defect_zero_and_both_kinds_occur():
    seen_regular, seen_irregular = False, False
    for L in (7, 8, 9, 12, 16, 30):
        g = cyclic(L)
        for num in range(1, 12):
            spec = BohrSpec(g, [1], Fraction(num, 12))
            regular = is_regular(spec)
            defect = regularity_defect(spec)
            assert regular == (defect == 0.0), (L, num)
            if regular:
                seen_regular = True
            else:
                seen_irregular = True
                assert defect > 0
                assert regularity_violations(spec)
    assert seen_regular and seen_irregular


def test_rank_zero_defect_raises():
    with pytest.raises(BohrError):
        regularity_defect(BohrSpec(cyclic(12), [], Fraction(1, 2)))


def test_find_regular_dilate():
    for L, num in ((30, 5), (401, 3), (8, 6)):
        spec = BohrSpec(cyclic(L), [1], Fraction(num, 12))
        reg = find_regular_dilate(spec)
        assert is_regular(reg)
        tau = reg.radius / spec.radius
        assert Fraction(1, 2) <= tau <= 1
        assert reg.freqs == spec.freqs


def test_radius_zero_always_regular():
    spec = BohrSpec(cyclic(30), [1], 0)
    assert is_regular(spec)
    assert regularity_defect(spec) == 0.0


# ---------------------------------------------------------------------------
# smoothing


def test_smoothing_l1_direct():
    g = cyclic(30)
    spec = BohrSpec(g, [1], Fraction(1, 3))
    B = set(realize(spec).indices.tolist())
    for t in range(30):
        want = Fraction(sum(1 for x in range(30) if ((x + t) % 30 in B) != (x in B)), len(B))
        assert smoothing_l1(spec, t) == want
    assert smoothing_l1(spec, 0) == 0


def test_smoothing_check_threshold():
    g = cyclic(401)
    spec = BohrSpec(g, [1], Fraction(1, 4))
    val = smoothing_l1(spec, 1)
    assert smoothing_check(spec, 1, val)
    assert not smoothing_check(spec, 1, val - Fraction(1, 10**9))
