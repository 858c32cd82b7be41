"""Discrete Fourier transform on abelian product groups: exact-definition
cross-checks, Parseval, spectra, and dissociated covers."""

import itertools
from fractions import Fraction

import numpy as np
import pytest
from conftest import rng_for

from vcgrp.fourier import (
    NAIVE_MAX_ORDER,
    SPECTRUM_TOL,
    Spectrum,
    chang_cover,
    dft,
    dft_naive,
    inverse_dft,
    large_spectrum,
    parseval_gap,
)
from vcgrp.groups import CyclicProductGroup, GroupError, cyclic, symmetric_group
from vcgrp.sets import CountFn, GSet, convolve


def _random_values(g, seed, lo=-5, hi=9):
    rng = rng_for(9100, g.order, seed)
    return rng.integers(lo, hi, size=g.order).astype(np.int64)


def _dft_by_definition(g, vals):
    """Direct double loop over the character table."""
    L = g.exponent
    out = np.zeros(g.order, dtype=np.complex128)
    for gamma in range(g.order):
        acc = 0j
        for x in range(g.order):
            acc += vals[x] * np.exp(-2j * np.pi * g.char_rootnum(gamma, x) / L)
        out[gamma] = acc
    return out


# ---------------------------------------------------------------------------
# transform correctness


@pytest.mark.parametrize("moduli", [[12], [2, 3, 5], [3, 4], [4, 17], [2, 2, 2, 2]])
def test_dft_matches_definition(moduli):
    g = CyclicProductGroup(moduli)
    vals = _random_values(g, 1)
    want = _dft_by_definition(g, vals)
    scale = max(1.0, float(np.abs(want).max()))
    assert np.abs(dft_naive(g, vals.astype(np.complex128)) - want).max() < 1e-9 * scale
    assert np.abs(dft(g, vals.astype(np.complex128)) - want).max() < 1e-9 * scale


def test_dft_fft_path_agrees_with_naive():
    # order 68 > naive cutoff: dft() takes the FFT route, dft_naive the sum
    g = CyclicProductGroup([4, 17])
    assert g.order > NAIVE_MAX_ORDER
    vals = _random_values(g, 2).astype(np.complex128)
    a, b = dft(g, vals), dft_naive(g, vals)
    assert np.abs(a - b).max() < 1e-9 * max(1.0, float(np.abs(b).max()))


@pytest.mark.parametrize("moduli", [[30], [3, 4], [4, 17], [128]])
def test_roundtrip(moduli):
    g = CyclicProductGroup(moduli)
    vals = _random_values(g, 3).astype(np.complex128)
    back = inverse_dft(g, dft(g, vals))
    assert np.abs(back - vals).max() < 1e-9 * max(1.0, float(np.abs(vals).max()))


@pytest.mark.parametrize("moduli", [[42], [6, 7], [100]])
def test_parseval(moduli):
    g = CyclicProductGroup(moduli)
    vals = _random_values(g, 4)
    energy = float(np.sum(np.abs(vals) ** 2))
    assert parseval_gap(g, vals) <= 1e-9 * max(1.0, energy)


def test_accepts_sets_and_count_functions():
    g = cyclic(12)
    A = GSet.from_indices(g, [0, 3, 6, 9])
    ind = dft(g, A)
    cf = dft(g, CountFn.indicator(A))
    assert np.abs(ind - cf).max() < 1e-12


def test_delta_and_constant_transforms():
    g = cyclic(12)
    delta0 = np.zeros(12)
    delta0[0] = 1
    assert np.abs(dft(g, delta0) - 1).max() < 1e-12

    x0 = 5
    delta = np.zeros(12)
    delta[x0] = 1
    fhat = dft(g, delta)
    L = g.exponent
    want = np.array([np.exp(-2j * np.pi * g.char_rootnum(gm, x0) / L) for gm in range(12)])
    assert np.abs(fhat - want).max() < 1e-12

    const = np.ones(12)
    chat = dft(g, const)
    assert abs(chat[0] - 12) < 1e-12
    assert np.abs(chat[1:]).max() < 1e-12


def test_subgroup_indicator_transform():
    # H = {0,3,6,9} in Z/12: fhat = |H| on the annihilator {0,4,8}, 0 elsewhere
    g = cyclic(12)
    H = GSet.from_indices(g, [0, 3, 6, 9])
    fhat = dft(g, H)
    for gamma in range(12):
        want = 4.0 if gamma % 4 == 0 else 0.0
        assert abs(fhat[gamma] - want) < 1e-12, gamma


def test_convolution_theorem():
    g = CyclicProductGroup([5, 6])
    f = CountFn(g, _random_values(g, 5))
    h = CountFn(g, _random_values(g, 6))
    conv = convolve(f, h)
    lhs = dft(g, conv)
    rhs = dft(g, f) * dft(g, h)
    assert np.abs(lhs - rhs).max() < 1e-7 * max(1.0, float(np.abs(rhs).max()))


def test_requires_product_form_group():
    s3 = symmetric_group(3)
    vals = np.ones(6)
    with pytest.raises(GroupError):
        dft(s3, vals)
    with pytest.raises(GroupError):
        dft_naive(s3, vals)
    with pytest.raises(GroupError):
        parseval_gap(s3, vals)
    with pytest.raises(GroupError):
        large_spectrum(s3, vals, Fraction(1, 2))


def test_value_vector_validation():
    g = cyclic(12)
    with pytest.raises(GroupError):
        dft(g, np.ones(11))
    with pytest.raises(GroupError):
        inverse_dft(g, np.ones(13))
    with pytest.raises(GroupError):
        dft(g, GSet.from_indices(cyclic(7), [0]))


# ---------------------------------------------------------------------------
# large spectrum


def test_large_spectrum_of_subgroup_indicator():
    g = cyclic(12)
    H = GSet.from_indices(g, [0, 3, 6, 9])
    spec = large_spectrum(g, H, 4)
    assert spec.members == (0, 4, 8)
    assert all(abs(m - 4.0) < 1e-9 for m in spec.magnitudes)
    assert spec.threshold == Fraction(4)

    assert large_spectrum(g, H, Fraction(9, 2)).members == ()
    assert large_spectrum(g, H, Fraction(1, 2)).members == (0, 4, 8)
    # threshold just above the magnitude, beyond the tolerance slack
    assert large_spectrum(g, H, 4 + 3 * SPECTRUM_TOL).members == ()


def test_large_spectrum_contains_trivial_character_for_measures():
    g = CyclicProductGroup([3, 4])
    A = GSet.from_indices(g, [0, 1, 5, 7])
    mu = CountFn.uniform_measure(A)
    spec = large_spectrum(g, mu, Fraction(1, 3))
    # muhat(0) = total mass = 1 >= any threshold <= 1
    assert 0 in spec.members
    assert spec.size >= 1


# ---------------------------------------------------------------------------
# dissociated covers


def _dual_combo(g, lam, eps):
    coords = np.zeros(len(g.moduli), dtype=np.int64)
    mods = np.array(g.moduli, dtype=np.int64)
    for e, gamma in zip(eps, lam):
        coords = (coords + e * np.array(g.coords(gamma), dtype=np.int64)) % mods
    return int(g.index_of([int(c) for c in coords]))


def _brute_dissociated(g, lam):
    for eps in itertools.product((-1, 0, 1), repeat=len(lam)):
        if any(eps) and _dual_combo(g, lam, eps) == g.identity:
            return False
    return True


def _brute_span(g, lam):
    return {_dual_combo(g, lam, eps) for eps in itertools.product((-1, 0, 1), repeat=len(lam))}


def test_chang_cover_on_subgroup_spectrum():
    g = cyclic(12)
    H = GSet.from_indices(g, [0, 3, 6, 9])
    cover = chang_cover(large_spectrum(g, H, 4))
    assert cover.members == (4,)
    assert cover.rank == 1
    assert cover.certified
    assert cover.span_size == 3


def test_chang_cover_handpicked_spectrum():
    g = cyclic(12)
    spec = Spectrum(group=g, threshold=Fraction(1), members=(1, 2, 3), magnitudes=(1.0, 1.0, 1.0), tol=0.0)
    cover = chang_cover(spec)
    assert cover.members == (1, 2)  # 3 = 1 + 2 is already covered
    assert cover.certified


def test_chang_cover_empty_spectrum():
    g = cyclic(12)
    spec = Spectrum(group=g, threshold=Fraction(1), members=(), magnitudes=(), tol=0.0)
    cover = chang_cover(spec)
    assert cover.rank == 0
    assert cover.certified
    assert cover.method == "empty"


def test_chang_cover_random_spectra_certified_and_covering():
    for moduli, seed in [([3, 4], 11), ([5, 5], 12), ([2, 2, 3], 13), ([30], 14)]:
        g = CyclicProductGroup(moduli)
        vals = _random_values(g, seed, lo=0, hi=3)
        spec = large_spectrum(g, vals.astype(np.complex128), Fraction(1, 1))
        cover = chang_cover(spec)
        assert cover.certified
        assert _brute_dissociated(g, cover.members)
        span = _brute_span(g, cover.members)
        assert set(spec.members) <= span
        assert cover.span_size == len(span)
