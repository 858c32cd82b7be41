"""Exact comparisons between rational numbers and trig values at rational angles.

Bohr-set membership reduces to comparing chord lengths |gamma(x) - 1|^2 =
2 - 2cos(2*pi*a/L) against rational thresholds.  Ties occur only at the
rational-cosine angles (denominator of a/L in {1,2,3,4,6}) and are handled
symbolically; everything else is decided by a guarded float evaluation with
a high-precision fallback.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath

FLOAT_GUARD = 1e-12
MP_DPS = 60
MP_GUARD = Fraction(1, 10**45)

# angle t = d/L in lowest terms with denominator q has rational cosine only
# for q in {1,2,3,4,6}; chord^2 = 2 - 2cos(2*pi*t) at those angles:
_NIVEN_CHORDS = {
    (0, 1): Fraction(0),
    (1, 6): Fraction(1),
    (1, 4): Fraction(2),
    (1, 3): Fraction(3),
    (1, 2): Fraction(4),
}


class ExactnessError(ArithmeticError):
    """A comparison could not be decided at the configured precision."""


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def chord_sq_cmp(d: int, L: int, q: Fraction) -> int:
    """Sign of (2 - 2cos(2*pi*d/L)) - q, exactly."""
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    q = Fraction(q)
    d = d % L
    if d > L - d:
        d = L - d
    # now 0 <= d <= L/2 and chord^2 is increasing in d
    if q < 0:
        return 1
    if q > 4:
        return -1
    g = math.gcd(d, L)
    reduced = (d // g, L // g) if d else (0, 1)
    niven = _NIVEN_CHORDS.get(reduced)
    if niven is not None:
        return _sign(niven - q)
    # the chord is irrational here, so no tie with a rational q is possible
    approx = 2.0 - 2.0 * math.cos(2.0 * math.pi * d / L)
    qf = float(q)
    if abs(approx - qf) > FLOAT_GUARD * max(1.0, abs(qf)):
        return _sign(approx - qf)
    for dps in (MP_DPS, 4 * MP_DPS):
        with mpmath.workdps(dps):
            val = 2 - 2 * mpmath.cos(2 * mpmath.pi * mpmath.mpf(d) / L)
            diff = val - mpmath.mpf(q.numerator) / q.denominator
            if abs(diff) > mpmath.mpf(MP_GUARD.numerator) / MP_GUARD.denominator:
                return _sign(diff)
    raise ExactnessError(
        f"cannot separate chord^2(2*pi*{d}/{L}) from {q} at {4 * MP_DPS} digits"
    )


def max_chord_index(L: int, q: Fraction) -> int:
    """Largest d in [0, L//2] with 2 - 2cos(2*pi*d/L) <= q.

    Requires q >= 0 (d = 0 always qualifies).
    """
    q = Fraction(q)
    if q < 0:
        raise ValueError("threshold must be >= 0")
    half = L // 2
    if q >= 4:
        return half
    # float seed, then exact boundary adjustment
    s = math.sqrt(float(q)) / 2.0
    d = int(math.asin(min(1.0, s)) / math.pi * L)
    d = max(0, min(half, d))
    while d < half and chord_sq_cmp(d + 1, L, q) <= 0:
        d += 1
    while d > 0 and chord_sq_cmp(d, L, q) > 0:
        d -= 1
    return d


def cmp_rational_times_pi_pow(a: Fraction, d: int, b: Fraction) -> int:
    """Sign of a*pi^d - b for rationals a, b and integer d >= 0.

    For d >= 1 and a != 0 no tie is possible (pi is transcendental).
    """
    a, b = Fraction(a), Fraction(b)
    if d == 0:
        return _sign(a - b)
    if a == 0:
        return _sign(-b)
    for dps in (50, 200):
        with mpmath.workdps(dps):
            lhs = mpmath.mpf(a.numerator) / a.denominator * mpmath.pi**d
            diff = lhs - mpmath.mpf(b.numerator) / b.denominator
            scale = max(abs(lhs), mpmath.mpf(1))
            if abs(diff) > scale * mpmath.mpf(10) ** (-(dps - 10)):
                return _sign(diff)
    raise ExactnessError(f"cannot separate {a}*pi^{d} from {b} at 200 digits")
