"""Subsets of a finite group and exact convolution arithmetic.

Functions with rational values are carried as integer numerator arrays
plus one declared denominator (CountFn), so every comparison downstream
can be done in integers after multiplying through.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from . import kernels
from .groups import Group

# FFT is used for convolutions on abelian groups above this order, with the
# result verified by rounding margin and an exact mass check.
FFT_MIN_ORDER = 65
_INT64_SAFE = 1 << 62
_FFT_SAFE = 1 << 52


class SetError(ValueError):
    """Invalid subset data or mismatched groups."""


class GSet:
    """An immutable subset of a finite group, stored as a boolean mask."""

    __slots__ = ("group", "_mask", "_indices", "_key")

    def __init__(self, group: Group, mask: np.ndarray):
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (group.order,):
            raise SetError(f"mask length {mask.shape} != group order {group.order}")
        mask = mask.copy()
        mask.setflags(write=False)
        self.group = group
        self._mask = mask
        self._indices: Optional[np.ndarray] = None
        self._key = mask.tobytes()

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_indices(cls, group: Group, indices: Iterable[int]) -> "GSet":
        mask = np.zeros(group.order, dtype=bool)
        for i in indices:
            mask[group.check_element(i)] = True
        return cls(group, mask)

    @classmethod
    def from_mask(cls, group: Group, mask: np.ndarray) -> "GSet":
        return cls(group, mask)

    @classmethod
    def from_coords(cls, group: Group, coords: Iterable[Sequence[int]]) -> "GSet":
        index_of = getattr(group, "index_of", None)
        if index_of is None:
            raise SetError("coordinate input requires a product-form group")
        return cls.from_indices(group, [index_of(c) for c in coords])

    @classmethod
    def full(cls, group: Group) -> "GSet":
        return cls(group, np.ones(group.order, dtype=bool))

    @classmethod
    def empty(cls, group: Group) -> "GSet":
        return cls(group, np.zeros(group.order, dtype=bool))

    # -- views ---------------------------------------------------------------

    @property
    def mask(self) -> np.ndarray:
        return self._mask

    @property
    def indices(self) -> np.ndarray:
        if self._indices is None:
            idx = np.flatnonzero(self._mask).astype(np.int64)
            idx.setflags(write=False)
            self._indices = idx
        return self._indices

    @property
    def card(self) -> int:
        return int(self._mask.sum())

    def __len__(self) -> int:
        return self.card

    def __contains__(self, x) -> bool:
        return bool(self._mask[self.group.check_element(x)])

    def __iter__(self):
        return iter(self.indices.tolist())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GSet)
            and self.group == other.group
            and self._key == other._key
        )

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        shown = self.indices[:12].tolist()
        tail = "..." if self.card > 12 else ""
        return f"GSet(|{self.card}| of {self.group.order}: {shown}{tail})"

    def issubset(self, other: "GSet") -> bool:
        _same_group(self, other)
        return bool((~other._mask & self._mask).sum() == 0)

    # -- set algebra -----------------------------------------------------------

    def union(self, other: "GSet") -> "GSet":
        _same_group(self, other)
        return GSet(self.group, self._mask | other._mask)

    def intersect(self, other: "GSet") -> "GSet":
        _same_group(self, other)
        return GSet(self.group, self._mask & other._mask)

    def difference(self, other: "GSet") -> "GSet":
        _same_group(self, other)
        return GSet(self.group, self._mask & ~other._mask)

    def symmetric_difference(self, other: "GSet") -> "GSet":
        _same_group(self, other)
        return GSet(self.group, self._mask ^ other._mask)

    # -- group actions -----------------------------------------------------------

    def translate(self, t: int, side: str = "left") -> "GSet":
        """t*A for side='left', A*t for side='right'."""
        idx = self.group.translate_indices(t, self.indices, side=side)
        mask = np.zeros(self.group.order, dtype=bool)
        mask[idx] = True
        return GSet(self.group, mask)

    def inverse(self) -> "GSet":
        mask = np.zeros(self.group.order, dtype=bool)
        mask[self.group.inv_perm()[self.indices]] = True
        return GSet(self.group, mask)

    def indicator(self) -> np.ndarray:
        return self._mask.astype(np.int64)

    def to_dict(self) -> dict:
        return {"group": self.group.describe(), "elements": self.indices.tolist()}


def _same_group(a: GSet, b: GSet) -> None:
    if a.group != b.group:
        raise SetError("sets live in different groups")


class CountFn:
    """An exact rational function on a group: integer values / denominator.

    values is either an int64 array (fast paths apply) or a list of Python
    ints when magnitudes exceed the int64-safe range.
    """

    __slots__ = ("group", "values", "denominator", "bignum")

    def __init__(self, group: Group, values, denominator: int = 1):
        denominator = int(denominator)
        if denominator < 1:
            raise SetError(f"denominator must be >= 1, got {denominator}")
        self.group = group
        self.denominator = denominator
        if isinstance(values, np.ndarray) and values.dtype == np.int64:
            vals = values.copy()
            vals.setflags(write=False)
            self.values = vals
            self.bignum = False
        else:
            if isinstance(values, np.ndarray):
                if values.dtype.kind not in "iu":
                    raise SetError("CountFn values must be integers")
                values = values.tolist()
            cleaned = []
            for v in values:
                if isinstance(v, (bool, float, complex, np.floating, np.complexfloating)):
                    raise SetError("CountFn values must be integers")
                cleaned.append(int(v))
            if any(abs(v) >= _INT64_SAFE for v in cleaned):
                self.values = cleaned
                self.bignum = True
            else:
                arr = np.array(cleaned, dtype=np.int64)
                arr.setflags(write=False)
                self.values = arr
                self.bignum = False
        n = len(self.values)
        if n != group.order:
            raise SetError(f"value vector length {n} != group order {group.order}")

    @classmethod
    def indicator(cls, A: GSet) -> "CountFn":
        return cls(A.group, A.indicator(), 1)

    @classmethod
    def uniform_measure(cls, A: GSet) -> "CountFn":
        """mu_A = indicator / |A|."""
        if A.card == 0:
            raise SetError("uniform measure of the empty set")
        return cls(A.group, A.indicator(), A.card)

    def value_at(self, x: int) -> Fraction:
        return Fraction(int(self.values[self.group.check_element(x)]), self.denominator)

    def as_float(self) -> np.ndarray:
        if self.bignum:
            return np.array([float(Fraction(v, self.denominator)) for v in self.values])
        return self.values / float(self.denominator)

    def total(self) -> Fraction:
        # exact Python-int summation; int64 accumulation could overflow
        vals = self.values if self.bignum else self.values.tolist()
        return Fraction(sum(vals), self.denominator)

    def max_abs_int(self) -> int:
        if self.bignum:
            return max(abs(v) for v in self.values)
        return int(np.abs(self.values).max()) if len(self.values) else 0

    def fractions(self) -> list[Fraction]:
        return [Fraction(int(v), self.denominator) for v in self.values]

    def __eq__(self, other) -> bool:
        if not isinstance(other, CountFn) or self.group != other.group:
            return False
        return self.fractions() == other.fractions()

    def __hash__(self):
        raise TypeError("CountFn is not hashable")

    def to_dict(self) -> dict:
        vals = [int(v) for v in self.values] if self.bignum else self.values.tolist()
        return {
            "group": self.group.describe(),
            "values": vals,
            "denominator": self.denominator,
        }


def _as_countfn(f: Union[GSet, CountFn]) -> CountFn:
    if isinstance(f, GSet):
        return CountFn.indicator(f)
    if isinstance(f, CountFn):
        return f
    raise SetError(f"expected GSet or CountFn, got {type(f).__name__}")


# -- product sets ---------------------------------------------------------------


def product_set(X: GSet, Y: GSet) -> GSet:
    """X*Y = {x*y : x in X, y in Y}."""
    _same_group(X, Y)
    g = X.group
    mask = np.zeros(g.order, dtype=bool)
    yidx = Y.indices
    for x in X.indices.tolist():
        mask[g.translate_indices(x, yidx, side="left")] = True
    return GSet(g, mask)


def quotient_set(A: GSet, B: GSet) -> GSet:
    """A*B^-1 = {a*b^-1 : a in A, b in B}."""
    return product_set(A, B.inverse())


def iterate_product(X: GSet, k: int) -> GSet:
    """k-fold product X*X*...*X; k >= 1."""
    k = int(k)
    if k < 1:
        raise SetError(f"iterate_product needs k >= 1, got {k}")
    out = X
    for _ in range(k - 1):
        if out.card == out.group.order:
            break
        out = product_set(out, X)
    return out


# -- convolution ------------------------------------------------------------------


def skew_convolve_counts(A: GSet, B: GSet) -> CountFn:
    """The count function x -> |A intersect x*B|, exactly.

    This is the skew convolution of indicators: (1_A o 1_B)(x) with
    f o g = f * g~ and g~(y) = g(y^-1).
    """
    _same_group(A, B)
    if A.card == 0 or B.card == 0:
        raise SetError("skew_convolve_counts requires nonempty sets")
    g = A.group
    fa = A.indicator()
    bidx = B.indices
    use_fft = (
        g.is_abelian
        and hasattr(g, "moduli")
        and g.order >= FFT_MIN_ORDER
        and B.card > 8
    )
    if use_fft:
        counts = _fft_cross_correlate(g, fa, B.indicator())
        if counts is not None:
            return CountFn(g, counts, 1)
    # |A intersect x*B| = sum_{b in B} 1_A(x*b)
    vals = np.ones(len(bidx), dtype=np.int64)
    counts = _sum_weighted_translates(g, fa, bidx, vals, invert=False)
    return CountFn(g, counts, 1)


def _tensor_shape(group) -> tuple[int, ...]:
    # index = x_1 + m_1*x_2 + ... puts x_1 fastest-varying; C order wants
    # the slowest axis first, so reverse the moduli.
    return tuple(reversed(group.moduli))


def _sum_weighted_translates(
    grp, f: np.ndarray, idx: np.ndarray, weights: np.ndarray, invert: bool
) -> np.ndarray:
    """sum_j weights[j] * f[x * z_j^(-1 if invert else 1)], chunked over j."""
    out = np.zeros(grp.order, dtype=np.int64)
    chunk = max(1, (1 << 23) // max(grp.order, 1))
    for start in range(0, len(idx), chunk):
        part = idx[start : start + chunk].tolist()
        rows = np.stack(
            [grp.perm_right(grp.inv(int(z)) if invert else int(z)) for z in part]
        )
        out += kernels.convolve_counts(
            f, np.asarray(part, dtype=np.int64), weights[start : start + len(part)], rows
        )
    return out


def _fft_cross_correlate(group, fa: np.ndarray, fb: np.ndarray) -> Optional[np.ndarray]:
    """Exact |A intersect x*B| via FFT, or None if verification fails."""
    shape = _tensor_shape(group)
    Fa = np.fft.fftn(fa.reshape(shape))
    Fb = np.fft.fftn(fb.reshape(shape))
    raw = np.fft.ifftn(Fa * np.conj(Fb)).reshape(-1).real
    counts = np.rint(raw).astype(np.int64)
    if np.abs(raw - counts).max() > 0.25:
        return None
    if sum(counts.tolist()) != int(fa.sum()) * int(fb.sum()):
        return None
    return counts


def convolve(f: Union[GSet, CountFn], g: Union[GSet, CountFn]) -> CountFn:
    """Convolution (f*g)(x) = sum_y f(y) g(y^-1 x), exact.

    Denominators multiply.  Falls back to arbitrary-precision integers
    when the result could exceed the int64-safe range.
    """
    f, g = _as_countfn(f), _as_countfn(g)
    if f.group != g.group:
        raise SetError("functions live in different groups")
    grp = f.group
    den = f.denominator * g.denominator

    f_max = f.max_abs_int()
    g_sum_abs = (
        sum(abs(v) for v in g.values) if g.bignum else int(np.abs(g.values).sum())
    )
    bound = f_max * g_sum_abs
    if f.bignum or g.bignum or bound >= _INT64_SAFE:
        return CountFn(grp, _convolve_bignum(grp, f, g), den)

    fv = np.asarray(f.values, dtype=np.int64)
    gv = np.asarray(g.values, dtype=np.int64)
    g_supp = np.flatnonzero(gv).astype(np.int64)
    if len(g_supp) == 0 or len(np.flatnonzero(fv)) == 0:
        return CountFn(grp, np.zeros(grp.order, dtype=np.int64), den)

    if grp.is_abelian and hasattr(grp, "moduli") and grp.order >= FFT_MIN_ORDER and bound < _FFT_SAFE and len(g_supp) > 8:
        shape = _tensor_shape(grp)
        raw = np.fft.ifftn(np.fft.fftn(fv.reshape(shape)) * np.fft.fftn(gv.reshape(shape)))
        raw = raw.reshape(-1).real
        out = np.rint(raw).astype(np.int64)
        if np.abs(raw - out).max() <= 0.25 and sum(out.tolist()) == sum(fv.tolist()) * sum(gv.tolist()):
            return CountFn(grp, out, den)

    # (f*g)(x) = sum_z g(z) f(x*z^-1)
    out = _sum_weighted_translates(grp, fv, g_supp, gv[g_supp], invert=True)
    return CountFn(grp, out, den)


def _convolve_bignum(grp, f: CountFn, g: CountFn) -> list:
    out = [0] * grp.order
    g_vals = g.values if g.bignum else g.values.tolist()
    f_vals = f.values if f.bignum else f.values.tolist()
    for z in range(grp.order):
        gz = g_vals[z]
        if gz == 0:
            continue
        perm = grp.perm_right(grp.inv(z))
        for x in range(grp.order):
            fv = f_vals[perm[x]]
            if fv:
                out[x] += fv * gz
    return out


def skew_convolve(f: Union[GSet, CountFn], g: Union[GSet, CountFn]) -> CountFn:
    """(f o g)(x) = (f * g~)(x) with g~(y) = g(y^-1)."""
    g = _as_countfn(g)
    inv = g.group.inv_perm()
    if g.bignum:
        tilde_vals = [g.values[int(i)] for i in inv.tolist()]
        tilde = CountFn(g.group, tilde_vals, g.denominator)
    else:
        tilde = CountFn(g.group, np.asarray(g.values)[inv], g.denominator)
    return convolve(f, tilde)


# -- shift deviation -----------------------------------------------------------------


def shift_deviation_num(f: CountFn, t: int, side: str = "left") -> int:
    """Integer numerator of ||tau_t f - f||_inf at f's denominator."""
    grp = f.group
    t = grp.check_element(t)
    perm = grp.perm_left(t) if side == "left" else grp.perm_right(t)
    if f.bignum:
        return max(abs(f.values[int(perm[x])] - f.values[x]) for x in range(grp.order))
    row = perm.reshape(1, -1).astype(np.int64)
    return int(kernels.max_abs_diff_rows(np.asarray(f.values, dtype=np.int64), row)[0])


def linf_shift_deviation(f: Union[GSet, CountFn], t: int, side: str = "left") -> Fraction:
    """||tau_t f - f||_inf with tau_t f(x) = f(t*x), as an exact rational."""
    f = _as_countfn(f)
    return Fraction(shift_deviation_num(f, t, side=side), f.denominator)
