"""Structured set generators: shapes, determinism, and descriptor dispatch."""

import itertools

import numpy as np
import pytest

from vcgrp.gensets import (
    ap,
    ap_union,
    box,
    build_set,
    gap,
    random_coset_union,
    random_set,
    random_subspace,
    subgroup_union,
)
from vcgrp.groups import CyclicProductGroup, GroupError, cyclic, symmetric_group
from vcgrp.sets import GSet, SetError


def test_ap_basic(z12):
    A = ap(z12, 2, 3, 4)
    assert A.indices.tolist() == [2, 5, 8, 11]
    # wraparound is fine as long as the points stay distinct
    B = ap(z12, 10, 5, 3)
    assert sorted(B.indices.tolist()) == [3, 8, 10]


def test_ap_collapse_raises(z12):
    with pytest.raises(SetError, match="collapsed"):
        ap(z12, 0, 4, 5)  # 0,4,8,0,...
    with pytest.raises(SetError):
        ap(z12, 0, 1, 0)


def test_ap_union_overlap(z12):
    A = ap_union(z12, 0, 1, 3, [1])
    assert sorted(A.indices.tolist()) == [0, 1, 2, 3]
    assert ap_union(z12, 0, 1, 3, []).card == 3


def test_box_matches_product():
    g = CyclicProductGroup([4, 5])
    B = box(g, [2, 3], corner=[3, 4])
    want = sorted(
        g.index_of([(3 + i) % 4, (4 + j) % 5]) for i in range(2) for j in range(3)
    )
    assert B.indices.tolist() == want
    assert box(g, [4, 5]).card == 20


def test_box_validation():
    g = CyclicProductGroup([4, 5])
    with pytest.raises(SetError):
        box(g, [2])
    with pytest.raises(SetError):
        box(g, [0, 3])
    with pytest.raises(GroupError):
        box(symmetric_group(3), [2])
    big = CyclicProductGroup([1201, 1201])
    with pytest.raises(SetError, match="cap"):
        box(big, [1101, 1000])


def test_gap_matches_direct(z401):
    A = gap(z401, 0, [1, 20], [15, 8])
    want = sorted({(a + 20 * b) % 401 for a in range(15) for b in range(8)})
    assert A.indices.tolist() == want


def test_random_set_determinism(z401):
    A = random_set(z401, "1/10", seed=7)
    B = random_set(z401, "1/10", seed=7)
    C = random_set(z401, "1/10", seed=8)
    assert A.card == 40  # floor(401/10)
    assert np.array_equal(A.indices, B.indices)
    assert not np.array_equal(A.indices, C.indices)
    assert random_set(z401, "1/100000", seed=0).card == 1
    with pytest.raises(SetError):
        random_set(z401, 0, seed=0)
    with pytest.raises(SetError):
        random_set(z401, "3/2", seed=0)


def test_subgroup_union(z12):
    H = GSet.from_indices(z12, [0, 4, 8])
    U = subgroup_union(z12, H, [0, 1])
    assert sorted(U.indices.tolist()) == [0, 1, 4, 5, 8, 9]
    with pytest.raises(SetError):
        subgroup_union(z12, H, [])


def test_random_subspace(f2_6):
    for dim in (0, 1, 3, 6):
        V = random_subspace(f2_6, dim, seed=11)
        assert V.card == 2**dim
        # closure under addition makes it a subgroup
        idx = set(V.indices.tolist())
        assert all(f2_6.op(x, y) in idx for x in idx for y in idx)
    again = random_subspace(f2_6, 3, seed=11)
    assert np.array_equal(again.indices, random_subspace(f2_6, 3, seed=11).indices)
    with pytest.raises(SetError):
        random_subspace(f2_6, 7, seed=0)
    with pytest.raises(GroupError):
        random_subspace(cyclic(8), 2, seed=0)


def test_random_coset_union(f2_6):
    A = random_coset_union(f2_6, codim=2, count=3, seed=5)
    assert A.card == 3 * 2**4
    # each point's coset is wholly contained
    sub = random_subspace(f2_6, 4, seed=5)
    for x in A.indices.tolist()[:4]:
        coset = {f2_6.op(x, h) for h in sub.indices.tolist()}
        assert coset <= set(A.indices.tolist())
    with pytest.raises(SetError):
        random_coset_union(f2_6, codim=2, count=5, seed=5)


def test_build_set_dispatch(z12, f2_6):
    cases = [
        (z12, {"kind": "explicit", "elements": [1, 5]}, [1, 5]),
        (z12, {"kind": "ap", "length": 3}, [0, 1, 2]),
        (z12, {"kind": "ap", "start": 2, "step": 3, "length": 2}, [2, 5]),
        (z12, {"kind": "ap_union", "length": 2, "translates": [6]}, [0, 1, 6, 7]),
        (z12, {"kind": "gap", "generators": [1, 4], "lengths": [2, 2]}, [0, 1, 4, 5]),
        (z12, {"kind": "full"}, list(range(12))),
    ]
    for g, desc, want in cases:
        assert build_set(g, desc).indices.tolist() == want, desc

    g2 = CyclicProductGroup([3, 4])
    assert build_set(g2, {"kind": "box", "lengths": [2, 2]}).card == 4
    assert build_set(
        g2, {"kind": "explicit", "elements_coords": [[0, 0], [1, 2]]}
    ).indices.tolist() == sorted([g2.index_of([0, 0]), g2.index_of([1, 2])])

    r = build_set(z12, {"kind": "random", "density": "1/4", "seed": 3})
    assert np.array_equal(r.indices, random_set(z12, "1/4", 3).indices)

    su = build_set(
        f2_6, {"kind": "subgroup_union", "basis": [[1, 0, 0, 0, 0, 0]], "reps": [0, 2]}
    )
    assert su.card == 4
    su2 = build_set(z12, {"kind": "subgroup_union", "subgroup_elements": [0, 6]})
    assert su2.indices.tolist() == [0, 6]

    rc = build_set(f2_6, {"kind": "random_coset_union", "codim": 3, "count": 2, "seed": 1})
    assert np.array_equal(rc.indices, random_coset_union(f2_6, 3, 2, 1).indices)

    with pytest.raises(SetError, match="unknown set generator"):
        build_set(z12, {"kind": "mystery"})
