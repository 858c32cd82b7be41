"""Randomized almost-period extraction and Bohr-set bootstrapping.

Every period reported here is certified by an exact integer comparison on
the skew convolution counts |A intersect xB|; randomness only decides which
candidates get tested, never whether a reported period is genuine.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .bohr import BohrSpec, find_regular_dilate, realize
from .fourier import ChangCover, Spectrum, chang_cover, large_spectrum
from .groups import Group, GroupError
from .sets import (
    CountFn,
    GSet,
    SetError,
    convolve,
    iterate_product,
    product_set,
    skew_convolve_counts,
)
from .util import (
    ceil_fraction,
    format_rational,
    isqrt_floor_fraction,
    parallel_map,
    parse_rational,
)

_INT64_GUARD = 1 << 62
_CHUNK_ENTRIES = 1 << 23
# rng streams are split by counter: default_rng([seed, _RNG_TAG, attempt])
_RNG_TAG = 150
MAX_SAMPLE_SIZE = 100_000_000
DEFAULT_C_SAMPLE = 64
DEFAULT_RETRIES = 10
# above this sample size the sampler switches to the exact full-scan oracle,
# which gives the same (T^-1 T)^k guarantee with T = all goodness-threshold
# periods in S; the randomized route exists for scales where |S| * |G| work
# is the bottleneck, which desk-size groups never reach
DEFAULT_SAMPLE_CAP = 1 << 20


class AlmostPeriodError(ValueError):
    """Sampling could not produce a usable period set; carries diagnostics."""

    def __init__(self, message: str, diagnostics: Optional[dict] = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


# -- exact scans ---------------------------------------------------------------------


def _goodness_flags(
    grp: Group,
    hvals: np.ndarray,
    fvals: np.ndarray,
    candidates: np.ndarray,
    ch: int,
    cf: int,
    bound: int,
    threads: int = 1,
) -> np.ndarray:
    """Per candidate t, whether max_x |ch*h(t*x) - cf*f(x)| <= bound, exactly.

    Falls back to Python bignum arithmetic when the products could overflow
    the int64 kernels.
    """
    order = grp.order
    candidates = np.asarray(candidates, dtype=np.int64)
    if len(candidates) == 0:
        return np.zeros(0, dtype=np.uint8)
    hmax = int(np.abs(hvals).max()) if len(hvals) else 0
    fmax = int(np.abs(fvals).max()) if len(fvals) else 0
    if ch * hmax + cf * fmax >= _INT64_GUARD or bound >= _INT64_GUARD:
        hl = [int(v) for v in hvals]
        fl = [int(v) for v in fvals]
        out = np.zeros(len(candidates), dtype=np.uint8)
        for i, t in enumerate(candidates):
            perm = grp.perm_left(int(t))
            if all(abs(ch * hl[int(perm[x])] - cf * fl[x]) <= bound for x in range(order)):
                out[i] = 1
        return out

    rows_per_chunk = max(1, _CHUNK_ENTRIES // max(order, 1))
    chunks = [
        candidates[i : i + rows_per_chunk]
        for i in range(0, len(candidates), rows_per_chunk)
    ]

    def scan(chunk: np.ndarray) -> np.ndarray:
        stack = np.empty((len(chunk), order), dtype=np.int64)
        for j, t in enumerate(chunk):
            stack[j] = grp.perm_left(int(t))
        return kernels.rows_all_within(hvals, fvals, stack, ch, cf, bound)

    return np.concatenate(parallel_map(scan, chunks, threads))


def _period_flags(
    counts: CountFn,
    normalizer: int,
    candidates: np.ndarray,
    eps: Fraction,
    threads: int = 1,
) -> np.ndarray:
    """Flags for ||tau_t(counts/normalizer) - counts/normalizer||_inf <= eps."""
    q = eps.denominator
    bound = eps.numerator * normalizer
    return _goodness_flags(
        counts.group, counts.values, counts.values, candidates, q, q, bound, threads
    )


def exact_almost_periods(A: GSet, B: GSet, eps, threads: int = 1) -> GSet:
    """All t with ||tau_t(mu_A o 1_B) - mu_A o 1_B||_inf <= eps, by full scan.

    tau_t f(x) = f(t*x).  The comparison is exact: with counts c(x) =
    |A intersect x*B| and eps = p/q, membership is q*max_x|c(tx)-c(x)| <= p*|A|.
    """
    eps = parse_rational(eps)
    if eps < 0:
        raise SetError(f"negative tolerance {eps}")
    counts = skew_convolve_counts(A, B)
    grp = A.group
    if eps >= 1:
        # deviations of mu_A o 1_B never exceed max value <= 1
        return GSet.full(grp)
    flags = _period_flags(counts, A.card, np.arange(grp.order), eps, threads)
    return GSet.from_indices(grp, np.flatnonzero(flags))


# -- tuple goodness ------------------------------------------------------------------


def _tuple_profile(grp: Group, B: GSet, weights: np.ndarray) -> np.ndarray:
    """h(x) = sum_j 1_B(x^-1 a_j) for the tuple with multiplicity vector weights.

    Computed as the convolution weights * 1_{B^-1}, since x^-1 a in B iff
    the inverse-translate relation a^-1 x in B^-1 holds.
    """
    h = convolve(CountFn(grp, weights.astype(np.int64)), B.inverse())
    if h.bignum:
        raise AlmostPeriodError("tuple too large for the int64 profile path")
    return h.values


def tuple_is_good(a: Sequence[int], A: GSet, B: GSet, eps_half) -> bool:
    """Whether ||mu_a o 1_B - mu_A o 1_B||_inf <= eps_half, exactly.

    Entries of a may lie anywhere in G (translated tuples are tested too).
    With n = len(a), h(x) = #{j : x^-1 a_j in B} and c(x) = |A intersect xB|,
    the check is max_x ||A|*h(x) - n*c(x)| <= eps_half*n*|A| over all of G.
    """
    grp = A.group
    idx = [grp.check_element(x) for x in a]
    n = len(idx)
    if n == 0:
        raise SetError("empty tuple")
    eps_half = parse_rational(eps_half)
    if eps_half < 0:
        raise SetError(f"negative tolerance {eps_half}")
    counts = skew_convolve_counts(A, B)
    weights = np.bincount(np.asarray(idx, dtype=np.int64), minlength=grp.order)
    hvals = _tuple_profile(grp, B, weights)
    p, q = eps_half.numerator, eps_half.denominator
    flags = _goodness_flags(
        grp,
        hvals,
        counts.values,
        np.asarray([grp.identity], dtype=np.int64),
        q * A.card,
        q * n,
        p * n * A.card,
    )
    return bool(flags[0])


# -- the sampler ---------------------------------------------------------------------


@dataclass(frozen=True)
class AlmostPeriodReport:
    """Outcome of randomized almost-period sampling.

    Every element of validated_set passed the exact eps check individually;
    T is the best surviving candidate set, validated_set = (T^-1 T)^k.
    """

    epsilon: Fraction
    T: GSet
    k: int
    validated_set: GSet
    sample_size: int
    retries: int
    attempts: int
    seed: int
    size_ratio: Fraction
    scope_size: int
    doubling: Fraction
    d_hint: int
    c_sample: Fraction
    goodness_threshold: Fraction
    sizes_per_attempt: tuple
    mode: str = "sampled"

    def to_dict(self) -> dict:
        return {
            "epsilon": format_rational(self.epsilon),
            "T": self.T.to_dict(),
            "k": self.k,
            "validated_set": self.validated_set.to_dict(),
            "sample_size": self.sample_size,
            "retries": self.retries,
            "attempts": self.attempts,
            "seed": self.seed,
            "size_ratio": format_rational(self.size_ratio),
            "scope_size": self.scope_size,
            "doubling": format_rational(self.doubling),
            "d_hint": self.d_hint,
            "c_sample": format_rational(self.c_sample),
            "goodness_threshold": format_rational(self.goodness_threshold),
            "sizes_per_attempt": list(self.sizes_per_attempt),
            "mode": self.mode,
        }


def sample_size_for(c_sample, d_hint: int, eps: Fraction, k: int = 1) -> int:
    """n = ceil(c_sample * d_hint * k^2 / eps^2), at least 1."""
    n = ceil_fraction(parse_rational(c_sample) * d_hint * k * k / (eps * eps))
    return max(1, n)


def sample_almost_periods(
    A: GSet,
    B: GSet,
    S: GSet,
    eps,
    d_hint: int,
    seed: int,
    c_sample=DEFAULT_C_SAMPLE,
    retries: int = DEFAULT_RETRIES,
    k: int = 1,
    threads: int = 1,
    sample_cap: Optional[int] = DEFAULT_SAMPLE_CAP,
) -> AlmostPeriodReport:
    """Sample tuples from A to certify almost-periods of mu_A o 1_B inside S.

    Each attempt draws a tuple a of n = ceil(c_sample*d_hint*k^2/eps^2)
    uniform elements of A and keeps T_a = {t in S : the translated tuple
    t^-1 a approximates mu_A o 1_B within eps/(2k) in L_inf}, retaining the
    largest T_a across attempts.  Every element of (T^-1 T)^k is then
    individually re-checked against the exact eps bound; by the triangle
    inequality this must succeed, and a failure raises.

    When the formula sample size n exceeds sample_cap, drawing the tuple
    would cost more than scanning S outright, so the attempt loop is
    replaced by a deterministic exact scan: T = every t in S whose exact
    deviation is within eps/(2k).  The (T^-1 T)^k guarantee is unchanged
    because it only uses the per-element threshold.  Pass sample_cap=None
    to force literal sampling at any n up to MAX_SAMPLE_SIZE.

    Randomness is counter-split per attempt from the master seed, so thread
    count never affects the report.
    """
    grp = A.group
    if B.group != grp or S.group != grp:
        raise SetError("A, B, S must live in one group")
    if A.card == 0 or B.card == 0 or S.card == 0:
        raise SetError("sample_almost_periods requires nonempty A, B, S")
    eps = parse_rational(eps)
    if not (0 < eps <= 1):
        raise SetError(f"eps must lie in (0, 1], got {eps}")
    d_hint = int(d_hint)
    if d_hint < 1:
        raise SetError(f"d_hint must be >= 1, got {d_hint}")
    k = int(k)
    if k < 1:
        raise SetError(f"k must be >= 1, got {k}")
    retries = int(retries)
    if retries < 1:
        raise SetError(f"retries must be >= 1, got {retries}")
    c_sample = parse_rational(c_sample)
    if c_sample <= 0:
        raise SetError(f"c_sample must be positive, got {c_sample}")

    n = sample_size_for(c_sample, d_hint, eps, k)
    use_scan = sample_cap is not None and n > int(sample_cap)
    if not use_scan and n > MAX_SAMPLE_SIZE:
        raise AlmostPeriodError(
            f"sample size {n} exceeds the supported maximum {MAX_SAMPLE_SIZE}; "
            "increase eps or decrease c_sample/d_hint",
            {"sample_size": n, "eps": str(eps), "d_hint": d_hint},
        )

    counts = skew_convolve_counts(A, B)
    threshold = eps / (2 * k)
    p, q = threshold.numerator, threshold.denominator
    a_idx = A.indices
    scope = S.indices

    best: Optional[np.ndarray] = None
    sizes = []
    attempts = 0
    if use_scan:
        flags = _period_flags(counts, A.card, scope, threshold, threads)
        best = scope[flags.astype(bool)]
    else:
        ch = q * A.card
        cf = q * n
        bound = p * n * A.card
        for attempt in range(retries):
            attempts = attempt + 1
            rng = np.random.default_rng([seed, _RNG_TAG, attempt])
            draws = rng.integers(0, len(a_idx), size=n)
            weights = np.bincount(a_idx[draws], minlength=grp.order)
            hvals = _tuple_profile(grp, B, weights)
            flags = _goodness_flags(grp, hvals, counts.values, scope, ch, cf, bound, threads)
            t_idx = scope[flags.astype(bool)]
            sizes.append(int(len(t_idx)))
            if best is None or len(t_idx) > len(best):
                best = t_idx
            if len(best) == len(scope):
                break

    if best is None or len(best) == 0:
        raise AlmostPeriodError(
            "no element of S passed the goodness threshold; eps may be too "
            "small for this sample size, or d_hint may underestimate the "
            "VC-dimension",
            {
                "sample_size": n,
                "eps": str(eps),
                "goodness_threshold": str(threshold),
                "d_hint": d_hint,
                "c_sample": str(c_sample),
                "retries": retries,
                "mode": "exact-scan" if use_scan else "sampled",
                "sizes_per_attempt": sizes,
            },
        )

    T = GSet.from_indices(grp, best)
    validated = iterate_product(product_set(T.inverse(), T), k)
    flags = _period_flags(counts, A.card, validated.indices, eps, threads)
    if not bool(flags.all()):
        offender = int(validated.indices[int(np.flatnonzero(flags == 0)[0])])
        raise AlmostPeriodError(
            "an element of (T^-1 T)^k failed the exact eps check; the triangle "
            "inequality forbids this, so this indicates a bug",
            {"offender": offender},
        )

    return AlmostPeriodReport(
        epsilon=eps,
        T=T,
        k=k,
        validated_set=validated,
        sample_size=n,
        retries=retries,
        attempts=attempts,
        seed=int(seed),
        size_ratio=Fraction(T.card, S.card),
        scope_size=S.card,
        doubling=Fraction(product_set(S, A).card, A.card),
        d_hint=d_hint,
        c_sample=c_sample,
        goodness_threshold=threshold,
        sizes_per_attempt=tuple(sizes),
        mode="exact-scan" if use_scan else "sampled",
    )


# -- the Fourier bootstrap -----------------------------------------------------------


@dataclass(frozen=True)
class BohrPeriodReport:
    """A regular Bohr set whose realized elements are checked as eps-periods."""

    spec: BohrSpec
    rank: int
    radius: Fraction
    base_radius: Fraction
    all_valid: bool
    worst_t: int
    worst_deviation: Fraction
    realized_size: int
    epsilon: Fraction
    eta: Fraction
    k: int
    seed: int
    sampler: AlmostPeriodReport
    spectrum: Spectrum
    cover: ChangCover

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "rank": self.rank,
            "radius": format_rational(self.radius),
            "base_radius": format_rational(self.base_radius),
            "all_valid": self.all_valid,
            "worst_t": self.worst_t,
            "worst_deviation": format_rational(self.worst_deviation),
            "realized_size": self.realized_size,
            "epsilon": format_rational(self.epsilon),
            "eta": format_rational(self.eta),
            "k": self.k,
            "seed": self.seed,
            "sampler": self.sampler.to_dict(),
            "spectrum": self.spectrum.to_dict(),
            "cover": self.cover.to_dict(),
        }


def bootstrap_k(eps: Fraction, eta: Fraction) -> int:
    """ceil(log2(2/(eps*sqrt(eta)))) + 1, computed exactly.

    The ceiling is the least k0 with 4^k0 * eps^2 * eta >= 4; one extra
    doubling is slack for the unspecified constant.
    """
    lhs = Fraction(eps * eps * eta)
    k0 = 0
    while 4**k0 * lhs.numerator < 4 * lhs.denominator:
        k0 += 1
    return k0 + 1


def _max_deviation(
    counts: CountFn, candidates: np.ndarray, threads: int = 1
) -> tuple[int, int]:
    """(worst numerator, worst candidate) of ||tau_t f - f||_inf over candidates."""
    grp = counts.group
    fvals = counts.values
    order = grp.order
    rows_per_chunk = max(1, _CHUNK_ENTRIES // max(order, 1))
    chunks = [
        candidates[i : i + rows_per_chunk]
        for i in range(0, len(candidates), rows_per_chunk)
    ]

    def scan(chunk: np.ndarray) -> np.ndarray:
        stack = np.empty((len(chunk), order), dtype=np.int64)
        for j, t in enumerate(chunk):
            stack[j] = grp.perm_left(int(t))
        return kernels.max_abs_diff_rows(fvals, stack)

    nums = np.concatenate(parallel_map(scan, chunks, threads))
    worst = int(np.argmax(nums))
    return int(nums[worst]), int(candidates[worst])


def bootstrap_bohr_periods(
    A: GSet,
    B: GSet,
    eps,
    d_hint: Optional[int] = None,
    seed: int = 0,
    c_sample=DEFAULT_C_SAMPLE,
    retries: int = DEFAULT_RETRIES,
    threads: int = 1,
    scope: Optional[GSet] = None,
    sample_cap: Optional[int] = DEFAULT_SAMPLE_CAP,
) -> BohrPeriodReport:
    """Bootstrap sampled periods into a regular Bohr set of eps-periods.

    Pipeline: sample at eps/3 with composition depth k = bootstrap_k(eps, eta)
    where eta = |A|/|B|; take the large spectrum of mu_T at threshold 1/2;
    cover it by a dissociated set; build the Bohr set at radius
    (1/3) eps sqrt(eta) / rank (rational square-root lower bound); pass to a
    regular dilate; finally re-check every realized element against the exact
    eps bound.  Failures are reported via all_valid=false with the worst
    offender, not raised: the underlying guarantee holds only above unknown
    absolute constants.
    """
    grp = A.group
    if B.group != grp:
        raise SetError("A and B must live in one group")
    if A.card == 0 or B.card == 0:
        raise SetError("bootstrap_bohr_periods requires nonempty A, B")
    if not grp.is_abelian:
        raise GroupError("the Bohr bootstrap needs an abelian group")
    if not hasattr(grp, "moduli"):
        raise GroupError(
            "the Bohr bootstrap needs a cyclic-product presentation of the group"
        )
    if A.card > B.card:
        raise SetError("bootstrap requires |A| <= |B| (eta = |A|/|B| <= 1)")
    eps = parse_rational(eps)
    if not (0 < eps <= 1):
        raise SetError(f"eps must lie in (0, 1], got {eps}")

    eta = Fraction(A.card, B.card)
    k = bootstrap_k(eps, eta)
    if d_hint is None:
        from .vc import vcd

        d_hint = max(1, vcd(A, B, cap=6).dimension)
    S = scope if scope is not None else GSet.full(grp)

    sampler = sample_almost_periods(
        A,
        B,
        S,
        eps / 3,
        d_hint,
        seed,
        c_sample=c_sample,
        retries=retries,
        k=k,
        threads=threads,
        sample_cap=sample_cap,
    )

    gamma = large_spectrum(grp, CountFn.uniform_measure(sampler.T), Fraction(1, 2))
    cover = chang_cover(gamma)
    m = cover.rank
    rho = Fraction(1, 3) * eps * isqrt_floor_fraction(eta) / max(m, 1)
    spec0 = BohrSpec(grp, cover.members, rho)
    spec_reg = spec0 if spec0.rank == 0 else find_regular_dilate(spec0)

    realized = realize(spec_reg)
    counts = skew_convolve_counts(A, B)
    worst_num, worst_t = _max_deviation(counts, realized.indices, threads)
    worst_dev = Fraction(worst_num, A.card)
    return BohrPeriodReport(
        spec=spec_reg,
        rank=spec_reg.rank,
        radius=spec_reg.radius,
        base_radius=rho,
        all_valid=worst_dev <= eps,
        worst_t=worst_t,
        worst_deviation=worst_dev,
        realized_size=realized.card,
        epsilon=eps,
        eta=eta,
        k=k,
        seed=int(seed),
        sampler=sampler,
        spectrum=gamma,
        cover=cover,
    )
