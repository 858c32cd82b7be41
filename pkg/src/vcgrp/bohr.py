"""Bohr sets: exact realization, dilates, subgroup content, regularity.

Bohr(Gamma, rho) = {x : |gamma(x) - 1| <= rho for all gamma in Gamma}.
Membership reduces to integers: with L the group exponent and a_gamma(x)
the root-number of gamma(x), the angle profile D(x) = max_gamma
min(a_gamma(x), L - a_gamma(x)) is monotone in the constraint, so
x is a member iff D(x) <= max_chord_index(L, rho^2).  Every radius
comparison goes through the exact chord comparator; no membership or
regularity decision depends on float rounding.

Regularity (rank d): 1 - 12d|tau| <= |B_{1+tau}|/|B| <= 1 + 12d|tau| for
all |tau| <= 1/12d.  |B_sigma| is a step function of sigma with jumps at
the attained values of D, so the full quantifier is decided exactly by
checking each constancy interval at its endpoint nearest sigma = 1.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .exactmath import chord_sq_cmp, cmp_rational_times_pi_pow, max_chord_index
from .groups import CyclicProductGroup, Group, GroupError, is_subgroup
from .sets import GSet
from .util import parse_rational

DEFECT_GRID_POINTS = 48
DILATE_GRID_POINTS = 97
DILATE_REFINEMENTS = 2


class BohrError(ValueError):
    """Invalid Bohr data or failed regularity search."""


class BohrRegularityError(BohrError):
    """No regular dilate found on the search grid."""

    def __init__(self, message: str, profile: list):
        super().__init__(message)
        self.profile = profile


class BohrSpec:
    """Frequencies (dual indices, dedup, identity dropped) plus a radius."""

    __slots__ = ("group", "freqs", "radius", "_profile")

    def __init__(self, group: Group, freqs: Iterable, radius):
        if not isinstance(group, CyclicProductGroup):
            raise BohrError("Bohr sets require an abelian group in product form")
        radius = parse_rational(radius) if not isinstance(radius, Fraction) else radius
        if radius < 0:
            raise BohrError(f"radius must be >= 0, got {radius}")
        norm = set()
        for f in freqs:
            if isinstance(f, (list, tuple, np.ndarray)):
                f = group.index_of(list(f))
            f = group.check_element(f)
            if f != group.identity:  # the identity never constrains
                norm.add(f)
        self.group = group
        self.freqs = tuple(sorted(norm))
        self.radius = radius
        self._profile: Optional[np.ndarray] = None

    @property
    def rank(self) -> int:
        return len(self.freqs)

    def angle_profile(self) -> np.ndarray:
        """D(x) = max_gamma min(a_gamma(x), L - a_gamma(x)); cached."""
        if self._profile is None:
            g = self.group
            L = g.exponent
            D = np.zeros(g.order, dtype=np.int64)
            for gamma in self.freqs:
                a = g.char_rootnums(gamma)
                np.maximum(D, np.minimum(a, L - a), out=D)
            D.setflags(write=False)
            self._profile = D
        return self._profile

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BohrSpec)
            and self.group == other.group
            and self.freqs == other.freqs
            and self.radius == other.radius
        )

    def __hash__(self) -> int:
        return hash((self.group, self.freqs, self.radius))

    def __repr__(self) -> str:
        return f"BohrSpec(rank={self.rank}, radius={self.radius})"

    def to_dict(self) -> dict:
        return {
            "group": self.group.describe(),
            "freqs": list(self.freqs),
            "radius": self.radius,
        }


def _member_cutoff(spec: BohrSpec) -> int:
    """Largest D value admitted at spec.radius."""
    return max_chord_index(spec.group.exponent, spec.radius * spec.radius)


def realize(spec: BohrSpec) -> GSet:
    """Exact membership set of the Bohr spec."""
    if spec.rank == 0:
        return GSet.full(spec.group)
    cutoff = _member_cutoff(spec)
    return GSet.from_mask(spec.group, spec.angle_profile() <= cutoff)


def dilate(spec: BohrSpec, tau) -> BohrSpec:
    tau = parse_rational(tau)
    if tau < 0:
        raise BohrError(f"dilation factor must be >= 0, got {tau}")
    out = BohrSpec(spec.group, spec.freqs, spec.radius * tau)
    out._profile = spec._profile  # same frequencies, same profile
    return out


def subgroup_inside(spec: BohrSpec) -> GSet:
    """Gamma-perp = Bohr(Gamma, 0) with subgroup and index checks.

    G/Gamma-perp embeds into the product of the character images, each of
    order dividing the exponent, so the index is at most exponent^rank.
    """
    g = spec.group
    if spec.rank == 0:
        return GSet.full(g)
    perp = GSet.from_mask(g, spec.angle_profile() == 0)
    if not is_subgroup(g, perp.indices):
        raise BohrError("annihilator failed the subgroup axioms; this indicates a bug")
    index = g.order // perp.card
    if g.order % perp.card != 0 or index > g.exponent**spec.rank:
        raise BohrError(
            f"annihilator index {index} exceeds exponent^rank = {g.exponent ** spec.rank}"
        )
    return perp


def size_lower_bound_check(spec: BohrSpec) -> dict:
    """Compare |B| against ((2/pi)*rho)^d * |G|, exactly.

    The comparison itself is exact (|B| * pi^d vs (2*rho)^d * |G|); whether
    the inequality holds is reported, not asserted -- it can genuinely fail.
    A comparison against the provable constant (rho/(2*pi))^d is included
    for diagnostics.
    """
    if spec.radius > 1:
        raise BohrError(f"size bound check requires radius <= 1, got {spec.radius}")
    g = spec.group
    B = realize(spec)
    d = spec.rank
    rho = spec.radius
    # |B| >= (2 rho / pi)^d |G|  <=>  |B| * pi^d >= (2 rho)^d * |G|
    lhs = Fraction(B.card)
    rhs = (2 * rho) ** d * g.order
    holds = cmp_rational_times_pi_pow(lhs, d, rhs) >= 0
    # provable variant: |B| >= (rho / 2pi)^d |G|  <=>  |B| (2 pi)^d >= rho^d |G|
    holds_provable = (
        cmp_rational_times_pi_pow(lhs * 2**d, d, rho**d * g.order) >= 0
    )
    return {
        "size": B.card,
        "bound": float((2 * rho / math.pi) ** d * g.order),
        "pass": holds,
        "provable_bound": float((rho / (2 * math.pi)) ** d * g.order),
        "provable_pass": holds_provable,
    }


# -- regularity ---------------------------------------------------------------
#
# Endpoints of size-constancy intervals in sigma = 1 + tau space are either
# rational (the window edges 1 -+ 1/12d) or breakpoints sigma_e =
# chord(e)/rho for attained D values e.  All comparisons against rationals
# reduce to the chord comparator.


def _cmp_endpoint(tag, L: int, rho: Fraction, q: Fraction) -> int:
    """Sign of (endpoint sigma) - q for rational q."""
    kind, val = tag
    if kind == "rat":
        return (val > q) - (val < q)
    # breakpoint: sigma_e = chord(e)/rho > 0 since e >= 1
    if q <= 0:
        return 1
    return chord_sq_cmp(val, L, q * q * rho * rho)


def _endpoint_float(tag, L: int, rho: Fraction) -> float:
    kind, val = tag
    if kind == "rat":
        return float(val)
    return math.sqrt(max(0.0, 2.0 - 2.0 * math.cos(2.0 * math.pi * val / L))) / float(rho)


def _size_intervals(spec: BohrSpec) -> Optional[list]:
    """Constancy intervals of sigma -> |B_sigma| over the regularity window.

    Returns a list of (left_tag, right_tag, count) or None when the window
    is degenerate (rho = 0: all dilates equal B, always regular).
    """
    d = spec.rank
    rho = spec.radius
    if d == 0:
        raise BohrError("regularity needs rank >= 1")
    if rho == 0:
        return None
    g = spec.group
    L = g.exponent
    w = Fraction(1, 12 * d)
    sig_lo, sig_hi = 1 - w, 1 + w

    D = spec.angle_profile()
    sorted_D = np.sort(D)
    uniq = np.unique(sorted_D)

    def count_upto(e: int) -> int:
        return int(np.searchsorted(sorted_D, e, side="right"))

    a_lo = max_chord_index(L, (sig_lo * rho) ** 2)
    a_hi = max_chord_index(L, (sig_hi * rho) ** 2)
    bps = [int(e) for e in uniq[(uniq > a_lo) & (uniq <= a_hi)]]

    intervals = []
    left = ("rat", sig_lo)
    count = count_upto(a_lo)
    for e in bps:
        intervals.append((left, ("bp", e), count))
        left = ("bp", e)
        count = count_upto(e)
    intervals.append((left, ("rat", sig_hi), count))
    return intervals


def _interval_violation(
    left, right, count: int, total: int, d: int, L: int, rho: Fraction
) -> Optional[dict]:
    """Check 1 - 12d|sigma-1| <= count/total <= 1 + 12d|sigma-1| on the hull.

    The lower bound is maximized and the upper bound minimized at the hull
    point nearest sigma = 1, so the full quantifier reduces to endpoint
    comparisons (both bounds are continuous and piecewise monotone).
    """
    r = Fraction(count, total)
    c = 12 * d
    q1 = Fraction(r - 1 + c, c)  # threshold for the 1-12d|tau| side
    q2 = Fraction(1 + c - r, c)  # threshold for the 1+12d|tau| side
    cmp_l = _cmp_endpoint(left, L, rho, Fraction(1))
    cmp_r = _cmp_endpoint(right, L, rho, Fraction(1))
    if cmp_l <= 0 <= cmp_r:
        if r != 1:
            return {"kind": "at-1", "ratio": r}
        return None
    if cmp_r < 0:
        # hull left of 1; nearest endpoint is the right one
        if _cmp_endpoint(right, L, rho, q1) > 0:
            return {"kind": "lower", "ratio": r, "endpoint": right}
        if _cmp_endpoint(right, L, rho, q2) > 0:
            return {"kind": "upper", "ratio": r, "endpoint": right}
        return None
    # hull right of 1; nearest endpoint is the left one
    if _cmp_endpoint(left, L, rho, q2) < 0:
        return {"kind": "lower", "ratio": r, "endpoint": left}
    if _cmp_endpoint(left, L, rho, q1) < 0:
        return {"kind": "upper", "ratio": r, "endpoint": left}
    return None


def regularity_violations(spec: BohrSpec) -> list:
    """All exact violations of the regularity inequality; empty iff regular."""
    intervals = _size_intervals(spec)
    if intervals is None:
        return []
    g = spec.group
    L = g.exponent
    rho = spec.radius
    d = spec.rank
    total = realize(spec).card
    out = []
    for left, right, count in intervals:
        v = _interval_violation(left, right, count, total, d, L, rho)
        if v is not None:
            v["sigma_hull"] = (
                _endpoint_float(left, L, rho),
                _endpoint_float(right, L, rho),
            )
            v["count"] = count
            out.append(v)
    return out


def is_regular(spec: BohrSpec) -> bool:
    return not regularity_violations(spec)


def regularity_defect(spec: BohrSpec, grid_points: int = DEFECT_GRID_POINTS) -> float:
    """Max violation of the regularity inequality; exactly 0 iff regular.

    The exact interval check decides regularity; when violated, the defect
    magnitude is measured on an equispaced tau grid plus all breakpoints.
    """
    if spec.rank == 0:
        raise BohrError("regularity needs rank >= 1")
    violations = regularity_violations(spec)
    if not violations:
        return 0.0
    g = spec.group
    d = spec.rank
    total = realize(spec).card
    w = 1.0 / (12 * d)
    D = spec.angle_profile()
    sorted_D = np.sort(D)

    def ratio_at(sigma: float) -> float:
        if spec.radius == 0:
            return 1.0
        r = float(spec.radius) * sigma
        chord_sq = r * r
        if chord_sq >= 4.0:
            cut = g.exponent // 2
        else:
            cut = int(math.asin(min(1.0, r / 2.0)) / math.pi * g.exponent)
            # float seed only: nudge to the exact cutoff
            while cut + 1 <= g.exponent // 2 and 2 - 2 * math.cos(
                2 * math.pi * (cut + 1) / g.exponent
            ) <= chord_sq:
                cut += 1
            while cut > 0 and 2 - 2 * math.cos(2 * math.pi * cut / g.exponent) > chord_sq:
                cut -= 1
        return float(np.searchsorted(sorted_D, cut, side="right")) / total

    taus = [(-w) + 2 * w * i / (grid_points - 1) for i in range(grid_points)]
    for v in violations:
        lo, hi = v["sigma_hull"]
        taus.extend([lo - 1.0, hi - 1.0])
        taus.append((lo + hi) / 2.0 - 1.0)
    defect = 0.0
    for tau in taus:
        if abs(tau) > w + 1e-15:
            continue
        ratio = ratio_at(1.0 + tau)
        lower = 1.0 - 12 * d * abs(tau)
        upper = 1.0 + 12 * d * abs(tau)
        defect = max(defect, lower - ratio, ratio - upper)
    # the exact check said irregular; the float sample can hide a knife-edge
    return max(defect, 1e-15)


def find_regular_dilate(
    spec: BohrSpec,
    grid_points: int = DILATE_GRID_POINTS,
    refinements: int = DILATE_REFINEMENTS,
) -> BohrSpec:
    """Largest tau in [1/2, 1] (on the search grid) whose dilate is regular.

    The grid is gridwise-descending rational; around each failure the next
    refinement level quadruples the density.  A regular dilate exists in
    [1/2, 1]; if the grid misses every regular interval the search errors
    with the defect profile.
    """
    if spec.rank == 0:
        raise BohrError("regularity needs rank >= 1")
    if spec.radius == 0:
        return spec
    profile = []
    points = grid_points
    for level in range(refinements + 1):
        step = Fraction(1, 2 * (points - 1))
        for i in range(points):
            tau = 1 - i * step
            cand = dilate(spec, tau)
            if not regularity_violations(cand):
                return cand
            if level == refinements:
                profile.append((float(tau), regularity_defect(cand)))
        points = 4 * (points - 1) + 1
    raise BohrRegularityError(
        f"no regular dilate on a {points}-point grid in [1/2, 1]; "
        "profile attached (grid too coarse for this spec)",
        profile,
    )


def smoothing_l1(spec: BohrSpec, t: int) -> Fraction:
    """sum_x |mu_B(x + t) - mu_B(x)| = |B symdiff (B - t)| / |B|, exact."""
    B = realize(spec)
    if B.card == 0:
        raise BohrError("empty Bohr set")  # impossible: identity is a member
    shifted = B.translate(spec.group.inv(t), side="left")
    return Fraction(B.symmetric_difference(shifted).card, B.card)


def smoothing_check(spec: BohrSpec, t: int, eps) -> bool:
    """Whether the exact L1 shift of mu_B by t is at most eps."""
    return smoothing_l1(spec, t) <= parse_rational(eps)
