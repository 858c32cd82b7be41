"""Fourier analysis on finite abelian groups in product form.

Conventions: fhat(gamma) = sum_x f(x) * conj(gamma(x)); inversion averages
over the dual, f(x) = (1/|G|) * sum_gamma fhat(gamma) * gamma(x).  The dual
group is indexed by the same mixed-radix scheme as the group itself, so
gamma_g(x) = exp(2*pi*i * sum_i g_i x_i / m_i).

The transform is the exact-definition naive sum for order <= 64 and a
mixed-radix FFT above that; both agree to floating precision and the naive
path serves as the independent oracle in tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .groups import CyclicProductGroup, Group, GroupError
from .sets import CountFn, GSet

NAIVE_MAX_ORDER = 64
SPECTRUM_TOL = 1e-9
SPAN_CAP = 10**7
MAX_CERTIFIABLE_RANK = 40


def _require_product_form(group: Group) -> CyclicProductGroup:
    if not isinstance(group, CyclicProductGroup):
        raise GroupError("Fourier analysis requires an abelian group in product form")
    return group


def _as_values(group: Group, f: Union[GSet, CountFn, Sequence, np.ndarray]) -> np.ndarray:
    if isinstance(f, GSet):
        if f.group != group:
            raise GroupError("set lives in a different group")
        return f.indicator().astype(np.complex128)
    if isinstance(f, CountFn):
        if f.group != group:
            raise GroupError("function lives in a different group")
        return f.as_float().astype(np.complex128)
    arr = np.asarray(f, dtype=np.complex128)
    if arr.shape != (group.order,):
        raise GroupError(f"value vector length {arr.shape} != group order {group.order}")
    return arr


def _tensor_shape(group: CyclicProductGroup) -> tuple[int, ...]:
    # mixed-radix index has the first factor fastest-varying; C order wants
    # the slowest axis first
    return tuple(reversed(group.moduli))


def dft_naive(group: Group, f) -> np.ndarray:
    """Exact-definition transform, quadratic in the order."""
    g = _require_product_form(group)
    vals = _as_values(g, f)
    L = g.exponent
    scale = (L // g._moduli_arr).astype(np.int64)
    C = g.coords_matrix()
    # root-number matrix R[gamma, x] = sum_i gamma_i x_i (L/m_i) mod L
    R = (C * scale) @ C.T % L
    W = np.exp(-2j * np.pi * R / L)
    return W @ vals


def dft(group: Group, f) -> np.ndarray:
    """fhat over dual indices; naive sum for order <= 64, FFT above."""
    g = _require_product_form(group)
    if g.order <= NAIVE_MAX_ORDER:
        return dft_naive(g, f)
    vals = _as_values(g, f)
    return np.fft.fftn(vals.reshape(_tensor_shape(g))).reshape(-1)


def inverse_dft(group: Group, coeffs) -> np.ndarray:
    """Inverse transform: f(x) = (1/|G|) sum_gamma fhat(gamma) gamma(x)."""
    g = _require_product_form(group)
    arr = np.asarray(coeffs, dtype=np.complex128)
    if arr.shape != (g.order,):
        raise GroupError(f"coefficient vector length {arr.shape} != group order {g.order}")
    if g.order <= NAIVE_MAX_ORDER:
        L = g.exponent
        scale = (L // g._moduli_arr).astype(np.int64)
        C = g.coords_matrix()
        R = (C * scale) @ C.T % L
        W = np.exp(2j * np.pi * R / L)
        return (W.T @ arr) / g.order
    return np.fft.ifftn(arr.reshape(_tensor_shape(g))).reshape(-1)


def parseval_gap(group: Group, f) -> float:
    """| E_gamma |fhat|^2 - sum_x |f|^2 |, which is 0 in exact arithmetic."""
    g = _require_product_form(group)
    vals = _as_values(g, f)
    fhat = dft(g, vals)
    lhs = float(np.mean(np.abs(fhat) ** 2))
    rhs = float(np.sum(np.abs(vals) ** 2))
    return abs(lhs - rhs)


@dataclass(frozen=True)
class Spectrum:
    """Dual indices where |fhat| clears the threshold."""

    group: Group
    threshold: Fraction
    members: tuple[int, ...]
    magnitudes: tuple[float, ...]
    tol: float

    @property
    def size(self) -> int:
        return len(self.members)

    def to_dict(self) -> dict:
        return {
            "group": self.group.describe(),
            "threshold": self.threshold,
            "members": list(self.members),
            "magnitudes": list(self.magnitudes),
            "tol": self.tol,
        }


def large_spectrum(group: Group, f, theta, tol: float = SPECTRUM_TOL) -> Spectrum:
    """{gamma : |fhat(gamma)| >= theta - tol}, sorted by dual index."""
    g = _require_product_form(group)
    theta = theta if isinstance(theta, Fraction) else Fraction(theta).limit_denominator(10**12)
    fhat = np.abs(dft(g, f))
    cut = float(theta) - tol
    members = np.flatnonzero(fhat >= cut)
    return Spectrum(
        group=g,
        threshold=theta,
        members=tuple(int(i) for i in members),
        magnitudes=tuple(float(fhat[i]) for i in members),
        tol=tol,
    )


@dataclass(frozen=True)
class ChangCover:
    """A maximal dissociated subset whose {0,+-1}-span covers the spectrum."""

    group: Group
    spectrum: tuple[int, ...]
    members: tuple[int, ...]
    certified: bool
    method: str
    span_size: int

    @property
    def rank(self) -> int:
        return len(self.members)

    def to_dict(self) -> dict:
        return {
            "group": self.group.describe(),
            "spectrum": list(self.spectrum),
            "members": list(self.members),
            "certified": self.certified,
            "method": self.method,
            "span_size": self.span_size,
        }


def _span_grow(group: CyclicProductGroup, span: set[int], gamma: int) -> set[int]:
    """span of Lambda+{gamma}: old span combined with +-gamma shifts."""
    neg = group.dual_neg(gamma)
    out = set(span)
    for s in span:
        out.add(group.dual_add(s, gamma))
        out.add(group.dual_add(s, neg))
    return out


def _dissociated_by_counting(group: CyclicProductGroup, lam: Sequence[int]) -> bool:
    """Dissociativity via exact enumeration of all 3^m combinations.

    Counts, with multiplicity, how many {-1,0,1} coefficient vectors sum to
    each dual element (dynamic programming keeps the state bounded by the
    group order).  Dissociated iff only the all-zero vector hits identity.
    """
    counts = {group.identity: 1}
    for g in lam:
        neg = group.dual_neg(g)
        nxt: dict[int, int] = {}
        for s, c in counts.items():
            for s2 in (s, group.dual_add(s, g), group.dual_add(s, neg)):
                nxt[s2] = nxt.get(s2, 0) + c
        counts = nxt
    return counts.get(group.identity, 0) == 1


def chang_cover(spectrum: Spectrum, span_cap: int = SPAN_CAP) -> ChangCover:
    """Greedy maximal dissociated subset of the spectrum, in dual order.

    Every spectrum member ends up in the {0,+-1}-span of the result.  All
    3^rank combinations are enumerated (with multiplicity, via counting DP)
    to certify dissociativity when 3^rank <= span_cap; above the cap the
    same count certifies up to rank 40, beyond which the construction is
    returned uncertified.
    """
    group = _require_product_form(spectrum.group)
    lam: list[int] = []
    span: set[int] = {group.identity}
    for gamma in spectrum.members:  # ascending dual index = greedy-in-dual-order
        if gamma in span:
            continue
        lam.append(gamma)
        span = _span_grow(group, span, gamma)
    m = len(lam)

    certified = False
    if m == 0:
        certified = True
        method = "empty"
    elif m <= MAX_CERTIFIABLE_RANK:
        certified = _dissociated_by_counting(group, lam) and all(
            g in span for g in spectrum.members
        )
        method = "exhaustive-count" if 3**m <= span_cap else "counting-dp"
    else:
        method = "rank-over-40"
    if m != 0 and m <= MAX_CERTIFIABLE_RANK and not certified:
        raise GroupError("greedy cover failed certification; this indicates a bug")
    return ChangCover(
        group=group,
        spectrum=spectrum.members,
        members=tuple(lam),
        certified=certified,
        method=method,
        span_size=len(span),
    )
