"""Order-property witnesses and stability: exhaustive search against a
brute-force oracle, staircase constructions, and the VC-dimension relation."""

import itertools

import pytest
from conftest import rng_for

from vcgrp.gensets import ap
from vcgrp.groups import cyclic, dihedral_group, symmetric_group
from vcgrp.sets import GSet, SetError
from vcgrp.stability import (
    DEFAULT_NODE_BUDGET,
    find_order_witness,
    is_k_stable,
    make_witness,
    stability_vcd_relation,
    staircase_witness,
    verify_witness,
)
from vcgrp.vc import vcd_global


def _brute_has_witness(A, k):
    """Rows are independent once b is fixed: a_i only needs its own pattern."""
    g = A.group
    n = g.order
    mem = A.mask
    for b in itertools.product(range(n), repeat=k):
        if all(
            any(
                all(bool(mem[g.op(a, b[j])]) == (i <= j) for j in range(k))
                for a in range(n)
            )
            for i in range(k)
        ):
            return True
    return False


def _random_gset(group, size, seed):
    rng = rng_for(9500, group.order, size, seed)
    idx = rng.choice(group.order, size=size, replace=False)
    return GSet.from_indices(group, [int(i) for i in idx])


# ---------------------------------------------------------------------------
# witness verification


def test_verify_witness_definition(z12):
    A = GSet.from_indices(z12, [0, 1, 2])
    # a_i = i-1, b_j = 3-j: a_i + b_j = i - j + 2 in [0,3) iff i <= j
    assert verify_witness(A, [0, 1, 2], [2, 1, 0])
    assert not verify_witness(A, [0, 1, 2], [0, 1, 2])
    assert not verify_witness(A, [], [])
    assert not verify_witness(A, [0], [0, 1])


def test_staircase_witness_on_interval():
    g = cyclic(50)
    for k in (1, 3, 5, 10):
        A = ap(g, 0, 1, k)
        w = staircase_witness(A, k)
        assert w.verified, k
        assert w.k == k
        assert w.a == tuple(range(k))
        assert w.b == tuple(range(k - 1, -1, -1))


def test_staircase_fails_with_wraparound():
    g = cyclic(4)
    A = ap(g, 0, 1, 3)
    assert not staircase_witness(A, 3).verified  # 2 + 2 wraps back into A


def test_make_witness_records_check(z12):
    A = GSet.from_indices(z12, [0, 1])
    w = make_witness(A, (0, 1), (1, 0))
    assert w.k == 2 and w.verified == verify_witness(A, (0, 1), (1, 0))


# ---------------------------------------------------------------------------
# witness search vs brute force


def test_find_order_witness_matches_bruteforce():
    groups = [cyclic(6), cyclic(8), symmetric_group(3), dihedral_group(4)]
    for g in groups:
        for size, seed in ((2, 0), (3, 1), (4, 2), (5, 3)):
            A = _random_gset(g, size, seed)
            for k in (1, 2):
                res = find_order_witness(A, k)
                assert res.status in ("witness", "none")
                assert (res.status == "witness") == _brute_has_witness(A, k), (
                    g.describe(),
                    size,
                    seed,
                    k,
                )
                if res.witness is not None:
                    assert res.witness.verified
                    assert verify_witness(A, res.witness.a, res.witness.b)


def test_find_order_witness_depth_three():
    g = cyclic(6)
    for seed in (4, 5, 6):
        A = _random_gset(g, 3, seed)
        res = find_order_witness(A, 3)
        assert (res.status == "witness") == _brute_has_witness(A, 3)


def test_subgroup_is_stable_beyond_one(z12):
    H = GSet.from_indices(z12, [0, 4, 8])
    assert find_order_witness(H, 1).status == "witness"
    for k in (2, 3, 4):
        assert find_order_witness(H, k).status == "none", k


def test_budget_exhaustion_is_unknown(z12):
    A = GSet.from_indices(z12, [0, 1, 2, 5])
    res = find_order_witness(A, 2, node_budget=0)
    assert res.status == "unknown"
    assert res.witness is None
    assert res.budget == 0


def test_find_order_witness_validation(z12):
    A = GSet.from_indices(z12, [0])
    with pytest.raises(SetError):
        find_order_witness(A, 0)
    assert find_order_witness(GSet.empty(z12), 2).status == "none"


def test_is_k_stable_statuses(z12):
    H = GSet.from_indices(z12, [0, 4, 8])
    assert is_k_stable(H, 2).status == "stable"
    A = ap(z12, 0, 1, 3)
    assert is_k_stable(A, 2).status == "unstable"
    assert is_k_stable(A, 2, node_budget=0).status == "unknown"
    assert DEFAULT_NODE_BUDGET == 10**7


# ---------------------------------------------------------------------------
# relation with the VC dimension


def test_stability_vcd_relation_interval():
    g = cyclic(50)
    A = ap(g, 0, 1, 5)
    rep = stability_vcd_relation(A, 8)
    # an interval of length 5 has witnesses exactly up to order 5
    assert rep.largest_witness_k == 5
    assert rep.stable_from == 6
    assert [s for _, s in rep.statuses] == ["witness"] * 5 + ["none"]
    assert rep.witness is not None and rep.witness.k == 5
    assert rep.relation_checked
    assert rep.vcd_global.dimension <= rep.stable_from - 1
    assert rep.vcd_global.dimension == vcd_global(A).dimension


def test_stability_vcd_relation_subgroup(z12):
    H = GSet.from_indices(z12, [0, 4, 8])
    rep = stability_vcd_relation(H, 4)
    assert rep.stable_from == 2
    assert rep.largest_witness_k == 1
    assert rep.relation_checked
    assert rep.vcd_global.dimension <= 1


def test_stability_vcd_relation_validation(z12):
    with pytest.raises(SetError):
        stability_vcd_relation(GSet.from_indices(z12, [0]), 0)
    with pytest.raises(SetError):
        stability_vcd_relation(GSet.empty(z12), 3)
