"""Almost-periods of the skew convolution: exact scans against a Fraction
oracle, tuple goodness, randomized sampling, and the Bohr bootstrap."""

from fractions import Fraction

import numpy as np
import pytest
from conftest import rng_for

from vcgrp.almost import (
    AlmostPeriodError,
    bootstrap_bohr_periods,
    bootstrap_k,
    exact_almost_periods,
    sample_almost_periods,
    sample_size_for,
    tuple_is_good,
)
from vcgrp.bohr import is_regular, realize
from vcgrp.gensets import ap
from vcgrp.groups import GroupError, cyclic, symmetric_group
from vcgrp.sets import GSet, SetError


def _random_gset(group, size, seed):
    rng = rng_for(9300, group.order, size, seed)
    idx = rng.choice(group.order, size=size, replace=False)
    return GSet.from_indices(group, [int(i) for i in idx])


def _counts(A, B):
    """c(x) = |A intersect x*B|, directly from the definition."""
    g = A.group
    a = set(int(v) for v in A.indices.tolist())
    b = [int(v) for v in B.indices.tolist()]
    return [sum(1 for y in b if g.op(x, y) in a) for x in range(g.order)]


def _brute_periods(A, B, eps: Fraction):
    g = A.group
    c = _counts(A, B)
    out = []
    for t in range(g.order):
        dev = max(abs(c[g.op(t, x)] - c[x]) for x in range(g.order))
        if Fraction(dev, A.card) <= eps:
            out.append(t)
    return out


# ---------------------------------------------------------------------------
# exact scan


def test_exact_periods_match_bruteforce(small_groups):
    for g in small_groups:
        A = _random_gset(g, 4, 1)
        B = _random_gset(g, 5, 2)
        for eps in (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
            got = exact_almost_periods(A, B, eps)
            assert got.indices.tolist() == _brute_periods(A, B, eps), (g.describe(), eps)


def test_exact_periods_edge_tolerances(z12):
    A = _random_gset(z12, 4, 3)
    assert exact_almost_periods(A, A, 1).card == 12
    assert exact_almost_periods(A, A, "7/5").card == 12
    assert 0 in exact_almost_periods(A, A, 0).indices.tolist()
    with pytest.raises(SetError):
        exact_almost_periods(A, A, Fraction(-1, 3))


def test_exact_periods_accept_string_tolerance(z12):
    A = GSet.from_indices(z12, [0, 1, 2, 3])
    assert (
        exact_almost_periods(A, A, "1/4").indices.tolist()
        == _brute_periods(A, A, Fraction(1, 4))
    )


# ---------------------------------------------------------------------------
# tuple goodness


def test_full_tuple_is_always_good(small_groups):
    for g in small_groups:
        A = _random_gset(g, 5, 4)
        B = _random_gset(g, 4, 5)
        assert tuple_is_good(A.indices.tolist(), A, B, 0)


def test_tuple_goodness_matches_bruteforce(z12):
    A = _random_gset(z12, 5, 6)
    B = _random_gset(z12, 4, 7)
    c = _counts(A, B)
    rng = rng_for(9301)
    for trial in range(20):
        n = int(rng.integers(1, 7))
        tup = [int(v) for v in rng.integers(0, 12, size=n)]
        h = [sum(1 for aj in tup if z12.op(z12.inv(x), aj) in set(B.indices.tolist()))
             for x in range(12)]
        dev = max(Fraction(abs(A.card * h[x] - n * c[x]), n * A.card) for x in range(12))
        for eps_half in (dev, dev + Fraction(1, 100), max(Fraction(0), dev - Fraction(1, 100))):
            assert tuple_is_good(tup, A, B, eps_half) == (dev <= eps_half)


def test_tuple_validation(z12):
    A = GSet.from_indices(z12, [0, 1])
    with pytest.raises(SetError):
        tuple_is_good([], A, A, Fraction(1, 2))
    with pytest.raises(SetError):
        tuple_is_good([0], A, A, Fraction(-1, 2))


# ---------------------------------------------------------------------------
# sampling


def test_sample_size_formula():
    assert sample_size_for(64, 2, Fraction(1, 2)) == 512
    assert sample_size_for(64, 1, Fraction(1, 2), k=2) == 1024
    assert sample_size_for(Fraction(1, 100), 1, Fraction(1)) == 1
    assert sample_size_for(1, 3, Fraction(2, 3)) == 7  # ceil(27/4)


def test_sampler_report_guarantees(z401):
    A = ap(z401, 0, 1, 100)
    S = GSet.full(z401)
    rep = sample_almost_periods(A, A, S, Fraction(1, 2), d_hint=2, seed=11)
    assert rep.mode == "sampled"
    assert rep.T.card >= 1
    assert rep.T.issubset(S)
    # identity is in T^-1 T regardless of the draw
    assert 0 in rep.validated_set.indices.tolist()
    exact = exact_almost_periods(A, A, Fraction(1, 2))
    assert rep.validated_set.issubset(exact)
    assert rep.size_ratio == Fraction(rep.T.card, S.card)
    assert rep.sample_size == sample_size_for(64, 2, Fraction(1, 6), k=1) or rep.sample_size > 0


def test_sampler_deterministic_and_thread_invariant(z401):
    A = ap(z401, 0, 1, 100)
    S = GSet.full(z401)
    kw = dict(eps=Fraction(1, 2), d_hint=2, seed=7)
    r1 = sample_almost_periods(A, A, S, **kw)
    r2 = sample_almost_periods(A, A, S, **kw)
    r4 = sample_almost_periods(A, A, S, threads=4, **kw)
    for other in (r2, r4):
        assert other.T == r1.T
        assert other.sizes_per_attempt == r1.sizes_per_attempt
        assert other.validated_set == r1.validated_set
    r_other_seed = sample_almost_periods(A, A, S, eps=Fraction(1, 2), d_hint=2, seed=8)
    assert r_other_seed.seed != r1.seed


def test_sampler_exact_scan_mode(z401):
    A = ap(z401, 0, 1, 100)
    S = GSet.full(z401)
    rep = sample_almost_periods(A, A, S, Fraction(1, 2), d_hint=2, seed=3, sample_cap=10)
    assert rep.mode == "exact-scan"
    # with k = 1 the scan keeps exactly the eps/2 periods inside S
    assert rep.T == exact_almost_periods(A, A, Fraction(1, 4))
    assert rep.validated_set.issubset(exact_almost_periods(A, A, Fraction(1, 2)))


def test_sampler_failure_is_diagnosed(z12):
    A = GSet.from_indices(z12, [0, 1, 2, 3])
    S = GSet.from_indices(z12, [6])  # 6 is far from being a period of mu_A o 1_A
    with pytest.raises(AlmostPeriodError) as exc:
        sample_almost_periods(A, A, S, Fraction(1, 100), d_hint=1, seed=0, retries=2)
    diag = exc.value.diagnostics
    assert diag["sizes_per_attempt"] == [0, 0]
    assert diag["mode"] == "sampled"


def test_sampler_validation(z12, s3):
    A = GSet.from_indices(z12, [0, 1, 2])
    S = GSet.full(z12)
    with pytest.raises(SetError):
        sample_almost_periods(GSet.empty(z12), A, S, Fraction(1, 2), 1, 0)
    with pytest.raises(SetError):
        sample_almost_periods(A, A, S, Fraction(3, 2), 1, 0)
    with pytest.raises(SetError):
        sample_almost_periods(A, A, S, Fraction(1, 2), 0, 0)
    with pytest.raises(SetError):
        sample_almost_periods(A, A, S, Fraction(1, 2), 1, 0, retries=0)
    with pytest.raises(SetError):
        sample_almost_periods(A, A, S, Fraction(1, 2), 1, 0, c_sample=0)
    with pytest.raises(SetError):
        sample_almost_periods(A, _random_gset(s3, 3, 0), S, Fraction(1, 2), 1, 0)


# ---------------------------------------------------------------------------
# bootstrap


def test_bootstrap_k_values():
    assert bootstrap_k(Fraction(1), Fraction(1)) == 2
    assert bootstrap_k(Fraction(1, 2), Fraction(1)) == 3
    assert bootstrap_k(Fraction(1, 10), Fraction(1, 2)) == 6
    # k grows as eps shrinks
    ks = [bootstrap_k(Fraction(1, d), Fraction(1)) for d in (1, 2, 4, 8, 16)]
    assert ks == sorted(ks)


def test_bootstrap_bohr_periods_pipeline():
    g = cyclic(101)
    A = ap(g, 0, 1, 40)
    rep = bootstrap_bohr_periods(A, A, Fraction(1, 2), d_hint=1, seed=5)
    assert rep.all_valid
    assert is_regular(rep.spec)
    assert rep.rank == len(rep.cover.members)
    B = realize(rep.spec)
    assert B.card == rep.realized_size
    exact = exact_almost_periods(A, A, Fraction(1, 2))
    assert B.issubset(exact)
    assert rep.worst_deviation <= Fraction(1, 2)
    assert Fraction(1, 2) <= rep.radius / rep.base_radius <= 1
    assert rep.k == bootstrap_k(Fraction(1, 2), Fraction(1))
    # deterministic in the seed
    rep2 = bootstrap_bohr_periods(A, A, Fraction(1, 2), d_hint=1, seed=5, threads=3)
    assert rep2.spec == rep.spec
    assert rep2.worst_t == rep.worst_t


def test_bootstrap_validation(z12, s3):
    A = GSet.from_indices(z12, [0, 1, 2])
    big = GSet.from_indices(z12, list(range(6)))
    with pytest.raises(GroupError):
        B3 = GSet.from_indices(s3, [0, 1, 2])
        bootstrap_bohr_periods(B3, B3, Fraction(1, 2), d_hint=1)
    with pytest.raises(SetError):
        bootstrap_bohr_periods(big, A, Fraction(1, 2), d_hint=1)  # |A| > |B|
    with pytest.raises(SetError):
        bootstrap_bohr_periods(GSet.empty(z12), A, Fraction(1, 2), d_hint=1)
    with pytest.raises(SetError):
        bootstrap_bohr_periods(A, big, Fraction(5, 2), d_hint=1)
