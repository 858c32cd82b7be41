"""VC dimension of translate families: brute-force cross-checks, frozen values,
translation invariances, and search-cap semantics."""

import itertools

import pytest
from conftest import brute_vc_dimension, rng_for
from hypothesis import given, settings
from hypothesis import strategies as st

from vcgrp.gensets import ap, ap_union, gap
from vcgrp.groups import cyclic, dihedral_group, is_coset, symmetric_group
from vcgrp.sets import GSet, SetError
from vcgrp.vc import (
    DEFAULT_CAP,
    MAX_SHATTER_SIZE,
    SetFamily,
    shatters,
    translate_family,
    vc_dimension,
    vcd,
    vcd_global,
    vcd_self,
    vcdr,
)


def _random_gset(group, size, seed):
    rng = rng_for(9000, group.order, size, seed)
    idx = rng.choice(group.order, size=size, replace=False)
    return GSet.from_indices(group, [int(i) for i in idx])


def _brute_family(A, B, scope):
    """Reconstruct the translate family straight from the definition.

    Returns (ground_elements_ascending, set_of_member_masks).
    """
    g = A.group
    a_elems = [int(x) for x in A.indices.tolist()]
    b_elems = [int(x) for x in B.indices.tolist()]
    if scope == "global":
        ground = list(range(g.order))
        xs = set(range(g.order))
        members = [{g.op(x, b) for b in b_elems} for x in xs]
    elif scope == "restricted":
        ground = a_elems
        ground_set = set(a_elems)
        xs = {g.op(a, g.inv(b)) for a in a_elems for b in b_elems}
        members = [ground_set & {g.op(x, b) for b in b_elems} for x in xs]
    elif scope == "right":
        ground = a_elems
        ground_set = set(a_elems)
        xs = {g.op(g.inv(b), a) for a in a_elems for b in b_elems}
        members = [ground_set & {g.op(b, x) for b in b_elems} for x in xs]
    else:
        raise AssertionError(scope)
    pos = {e: i for i, e in enumerate(ground)}
    masks = set()
    for m in members:
        bits = 0
        for e in m:
            bits |= 1 << pos[e]
        masks.add(bits)
    return ground, masks


def _brute_lex_least_witness(masks, ground, k):
    """First (lexicographic) k-subset of ground shattered by the masks."""
    if k == 0:
        return ()
    for S in itertools.combinations(range(len(ground)), k):
        traces = {tuple((m >> p) & 1 for p in S) for m in masks}
        if len(traces) == 1 << k:
            return tuple(ground[p] for p in S)
    return None


def _pairs_for(group):
    sizes = [(2, 3), (3, 3), (4, 2), (5, 4), (4, 4)]
    out = []
    for t, (sa, sb) in enumerate(sizes):
        out.append(
            (
                _random_gset(group, min(sa, group.order), 2 * t),
                _random_gset(group, min(sb, group.order), 2 * t + 1),
            )
        )
    return out


# ---------------------------------------------------------------------------
# family construction


@pytest.mark.parametrize("scope", ["restricted", "global", "right"])
def test_translate_family_matches_definition(small_groups, scope):
    for g in small_groups:
        for A, B in _pairs_for(g):
            fam = translate_family(A, B, scope=scope)
            ground, masks = _brute_family(A, B, scope)
            assert [int(x) for x in fam.ground.indices.tolist()] == ground
            assert set(fam.member_masks) == masks
            assert len(fam.member_masks) == len(masks)  # library dedups


def test_translate_family_validation(z12, s3):
    A = _random_gset(z12, 3, 0)
    with pytest.raises(SetError):
        translate_family(GSet.empty(z12), A)
    with pytest.raises(SetError):
        translate_family(A, GSet.empty(z12))
    with pytest.raises(SetError):
        translate_family(A, _random_gset(s3, 3, 0))
    with pytest.raises(ValueError):
        translate_family(A, A, scope="sideways")


def test_from_sets_subset_and_dedup(z12):
    ground = GSet.from_indices(z12, [0, 1, 2, 3])
    inside = GSet.from_indices(z12, [1, 2])
    outside = GSet.from_indices(z12, [1, 7])
    with pytest.raises(SetError):
        SetFamily.from_sets(ground, [outside])
    fam = SetFamily.from_sets(ground, [inside, inside, ground])
    assert fam.size == 2
    fam_raw = SetFamily.from_sets(ground, [inside, inside], dedup=False)
    assert fam_raw.size == 2
    assert fam.member_indices(0) == [1, 2]


# ---------------------------------------------------------------------------
# dimension against the independent oracle


@pytest.mark.parametrize("scope", ["restricted", "right"])
def test_vcd_matches_bruteforce(small_groups, scope):
    for g in small_groups:
        for A, B in _pairs_for(g):
            res = vcd(A, B, scope=scope, cap=6)
            ground, masks = _brute_family(A, B, scope)
            want = brute_vc_dimension(masks, len(ground), cap=6)
            assert res.dimension == want, (g.describe(), scope)
            assert not res.reached_cap
            assert res.witness == _brute_lex_least_witness(masks, ground, want)
            assert len(res.witness) == res.dimension
            if res.dimension > 0:
                assert shatters(translate_family(A, B, scope=scope), res.witness)


def test_vcd_global_matches_bruteforce(z12, s3):
    for g in (z12, s3):
        for A, _ in _pairs_for(g)[:3]:
            res = vcd_global(A, cap=6)
            ground, masks = _brute_family(A, A, "global")
            assert res.dimension == brute_vc_dimension(masks, len(ground), cap=6)
            assert res.ground_size == g.order
            # the restricted family is a trace of the global one
            assert vcd_self(A, cap=6).dimension <= res.dimension


@settings(max_examples=50, deadline=None)
@given(
    n=st.integers(min_value=2, max_value=10),
    bits_a=st.integers(min_value=1, max_value=(1 << 10) - 1),
    bits_b=st.integers(min_value=1, max_value=(1 << 10) - 1),
    scope=st.sampled_from(["restricted", "right", "global"]),
)
def test_vcd_matches_bruteforce_hypothesis(n, bits_a, bits_b, scope):
    g = cyclic(n)
    A = GSet.from_indices(g, [i for i in range(n) if (bits_a >> i) & 1])
    B = GSet.from_indices(g, [i for i in range(n) if (bits_b >> i) & 1])
    if A.card == 0 or B.card == 0:
        return
    res = vcd(A, B, scope=scope, cap=5)
    ground, masks = _brute_family(A, B, scope)
    assert res.dimension == brute_vc_dimension(masks, len(ground), cap=5)


# ---------------------------------------------------------------------------
# degenerate families


def test_empty_family_dimension(z12):
    ground = GSet.from_indices(z12, [0, 1, 2])
    fam = SetFamily.from_sets(ground, [])
    res = vc_dimension(fam)
    assert res.dimension == -1
    assert res.witness is None
    assert not res.reached_cap
    assert not shatters(fam, ())


def test_single_member_family_dimension_zero(z12):
    ground = GSet.from_indices(z12, [0, 1, 2])
    fam = SetFamily.from_sets(ground, [ground])
    res = vc_dimension(fam)
    assert res.dimension == 0
    assert res.witness == ()
    assert not res.reached_cap
    assert shatters(fam, ())
    assert not shatters(fam, (0,))


def test_two_member_family_dimension_one(z12):
    ground = GSet.from_indices(z12, [0, 1, 2])
    fam = SetFamily.from_sets(ground, [ground, GSet.empty(z12)])
    res = vc_dimension(fam)
    assert res.dimension == 1
    assert res.witness == (0,)


# ---------------------------------------------------------------------------
# cap semantics


def test_cap_semantics(z401):
    A = ap(z401, 0, 1, 20)
    true_dim = vcd_self(A).dimension
    assert true_dim == 2

    capped = vcd(A, A, cap=1)
    assert capped.dimension == 1
    assert capped.reached_cap
    assert capped.dimension_str == ">= 1"
    assert len(capped.witness) == 1

    zero = vcd(A, A, cap=0)
    assert zero.dimension == 0
    assert zero.reached_cap
    assert zero.witness == ()

    # a cap equal to the true dimension cannot certify exhaustion
    at_dim = vcd(A, A, cap=true_dim)
    assert at_dim.dimension == true_dim
    assert at_dim.reached_cap

    above = vcd(A, A, cap=true_dim + 1)
    assert above.dimension == true_dim
    assert not above.reached_cap
    assert above.dimension_str == str(true_dim)

    with pytest.raises(ValueError):
        vcd(A, A, cap=-1)


def test_to_dict_roundtrip_fields(z12):
    A = _random_gset(z12, 4, 7)
    res = vcd_self(A)
    d = res.to_dict()
    assert d["dimension"] == res.dimension
    assert d["witness"] == list(res.witness)
    assert d["cap"] == DEFAULT_CAP
    assert d["family_size"] == res.family_size
    assert d["ground_size"] == A.card


# ---------------------------------------------------------------------------
# frozen structural values


def test_ap_dimension_values(z401):
    # wraparound-free progressions: dimension 1 at length 2, 2 from length 3 on
    assert vcd_self(ap(z401, 0, 5, 2)).dimension == 1
    assert vcd_self(ap(z401, 0, 5, 3)).dimension == 2
    assert vcd_self(ap(z401, 0, 5, 10)).dimension == 2
    assert vcd_self(ap(z401, 3, 5, 41)).dimension == 2


def test_structured_set_dimension_values(z401):
    assert vcd_self(ap(z401, 0, 1, 100)).dimension == 2
    assert vcd_self(ap_union(z401, 0, 1, 40, [100, 200])).dimension == 3
    assert vcd_self(gap(z401, 0, [1, 20], [15, 8])).dimension == 4


def test_coset_iff_dimension_zero_exhaustive():
    g = cyclic(6)
    for bits in range(1, 1 << 6):
        elems = [i for i in range(6) if (bits >> i) & 1]
        A = GSet.from_indices(g, elems)
        dim = vcd_self(A).dimension
        assert (dim == 0) == is_coset(g, elems), elems


def test_full_group_and_subgroup_dimension_zero(z12):
    assert vcd_self(GSet.full(z12)).dimension == 0
    sub = GSet.from_indices(z12, [0, 4, 8])
    assert vcd_self(sub).dimension == 0
    assert vcd_self(sub.translate(5)).dimension == 0


# ---------------------------------------------------------------------------
# invariances


def test_left_translate_invariance(small_groups):
    for g in small_groups:
        for A, B in _pairs_for(g)[:3]:
            base = vcd(A, B).dimension
            for t in (1, g.order - 1):
                tA = A.translate(t, side="left")
                assert vcd(tA, B).dimension == base


def test_joint_right_translate_invariance(small_groups):
    for g in small_groups:
        for A, B in _pairs_for(g)[:3]:
            base = vcd(A, B).dimension
            for t in (1, g.order // 2):
                At = A.translate(t, side="right")
                Bt = B.translate(t, side="right")
                assert vcd(At, Bt).dimension == base


def test_duality_left_right(small_groups):
    for g in small_groups:
        for A, B in _pairs_for(g):
            assert vcd(A.inverse(), B.inverse()).dimension == vcdr(A, B).dimension


def test_abelian_single_translate_invariance(z12):
    for A, B in _pairs_for(z12)[:3]:
        base = vcd(A, B).dimension
        assert vcd(A, B.translate(5)).dimension == base


# ---------------------------------------------------------------------------
# shattering checks


def test_shatters_explicit(z12):
    A = GSet.from_indices(z12, [0, 1, 2, 3, 4, 5])
    fam = translate_family(A, A)
    res = vc_dimension(fam)
    assert res.dimension >= 1
    assert shatters(fam, res.witness)
    assert shatters(fam, GSet.from_indices(z12, list(res.witness)))
    # a set larger than the dimension is never shattered
    for S in itertools.combinations([int(x) for x in A.indices.tolist()], res.dimension + 1):
        assert not shatters(fam, S)


def test_shatters_validation(z12):
    A = GSet.from_indices(z12, [0, 1, 2])
    fam = translate_family(A, A)
    with pytest.raises(SetError):
        shatters(fam, (7,))
    with pytest.raises(ValueError):
        shatters(fam, range(MAX_SHATTER_SIZE + 1))
    assert shatters(fam, (0, 0)) == shatters(fam, (0,))  # duplicates collapse


def test_constants_frozen():
    assert MAX_SHATTER_SIZE == 30
    assert DEFAULT_CAP == 10
