"""Arithmetic regularity decompositions and difference-set subspace extraction.

Both pipelines run the Fourier period bootstrap and then post-process its
Bohr set: the regularity route trims A to the points well covered by the
period set and reports A ~ A' + H with an exact symmetric-difference ratio,
while the extraction route keeps only the kernel of the frequencies and
certifies element by element that it sits inside A - A.  Every recorded
flag is an exact integer comparison; the unproven absolute constants of the
underlying bounds make the flags reportable rather than raisable.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .almost import (
    DEFAULT_C_SAMPLE,
    DEFAULT_RETRIES,
    DEFAULT_SAMPLE_CAP,
    BohrPeriodReport,
    bootstrap_bohr_periods,
)
from .bohr import BohrSpec, dilate, find_regular_dilate, realize, subgroup_inside
from .freiman import ModelEmbedding, model_embed
from .groups import VectorSpaceGroup, is_subgroup
from .sets import (
    CountFn,
    GSet,
    SetError,
    convolve,
    product_set,
    quotient_set,
    skew_convolve_counts,
)
from .util import format_rational, parse_rational, to_jsonable


class RegularityError(ValueError):
    """Invalid input or a certified-impossible internal state."""


@dataclass(frozen=True)
class RegularityDecomposition:
    """A ~ W = A' + H up to an exactly computed symmetric difference.

    checks holds the exact pass/fail flags; observables holds the logged
    quantities whose target values depend on unspecified absolute constants
    (most notably the dilated-set density clause).
    """

    epsilon: Fraction
    nu: Fraction
    delta: Fraction
    bootstrap: BohrPeriodReport
    T: GSet
    H_spec: BohrSpec
    H: GSet
    A_prime: GSet
    W: GSet
    symdiff_ratio: Fraction
    rank: int
    tau: Fraction
    dilate_D: Fraction
    checks: dict
    observables: dict
    seed: int
    basis: Optional[tuple] = None
    codimension: Optional[int] = None
    coset_densities: Optional[tuple] = None

    def to_dict(self) -> dict:
        out = {
            "epsilon": format_rational(self.epsilon),
            "nu": format_rational(self.nu),
            "delta": format_rational(self.delta),
            "bootstrap": self.bootstrap.to_dict(),
            "T_size": self.T.card,
            "H_spec": self.H_spec.to_dict(),
            "H": self.H.to_dict(),
            "A_prime": self.A_prime.to_dict(),
            "W": self.W.to_dict(),
            "symdiff_ratio": format_rational(self.symdiff_ratio),
            "rank": self.rank,
            "tau": format_rational(self.tau),
            "dilate_D": format_rational(self.dilate_D),
            "checks": dict(self.checks),
            "observables": to_jsonable(self.observables),
            "seed": self.seed,
        }
        if self.basis is not None:
            out["basis"] = [list(row) for row in self.basis]
            out["codimension"] = self.codimension
            out["coset_densities"] = [
                {"rep": rep, "density": format_rational(dens), "in_W": in_w}
                for rep, dens, in_w in self.coset_densities
            ]
        return out


def _covered_points(A: GSet, T: GSet, eps: Fraction) -> GSet:
    """Points of A with 1_A * mu_T >= 1 - eps/10, decided in integers."""
    vals = convolve(CountFn.indicator(A), CountFn.uniform_measure(T)).values
    p, q = eps.numerator, eps.denominator
    keep = [a for a in A.indices.tolist() if 10 * q * int(vals[a]) >= (10 * q - p) * T.card]
    return GSet.from_indices(A.group, keep)


def regularity_bohr(
    A: GSet,
    eps,
    nu,
    seed: int = 0,
    c_sample=DEFAULT_C_SAMPLE,
    retries: int = DEFAULT_RETRIES,
    threads: int = 1,
    scope: Optional[GSet] = None,
    dilate_D=None,
    sample_cap: Optional[int] = DEFAULT_SAMPLE_CAP,
) -> RegularityDecomposition:
    """Decompose A as A' + H for a regular Bohr set H of eps-quality.

    Runs the bootstrap at delta = eps^2/100, keeps A' = points of A whose
    translate of the period set stays inside A up to density delta^(1/2),
    and dilates the period Bohr set by tau = nu * delta^(1/2) / (24 * rank)
    so that convolving with it moves indicators by at most the smoothing
    budget.  All inclusion and size flags are exact; the density clause for
    the dilate-by-D companion set is logged under observables.
    """
    if A.card == 0:
        raise SetError("regularity_bohr requires a nonempty set")
    eps = parse_rational(eps)
    if not (0 < eps < 1):
        raise RegularityError(f"eps must lie in (0, 1), got {eps}")
    nu = parse_rational(nu)
    if not (0 <= nu <= 1):
        raise RegularityError(f"nu must lie in [0, 1], got {nu}")
    grp = A.group
    delta = eps * eps / 100

    boot = bootstrap_bohr_periods(
        A,
        A,
        delta,
        seed=seed,
        c_sample=c_sample,
        retries=retries,
        threads=threads,
        scope=scope,
        sample_cap=sample_cap,
    )
    T = realize(boot.spec)
    m = boot.rank

    A_prime = _covered_points(A, T, eps)
    # delta^(1/2) = eps/10 exactly; Lemma-scale dilate keeps the L1 motion
    # of 1_(A') under mu_H below eps/10 per unit of nu
    tau = nu * (eps / 10) / (24 * max(m, 1))
    H0 = dilate(boot.spec, tau)
    H_spec = H0 if (H0.rank == 0 or H0.radius == 0) else find_regular_dilate(H0)
    H = realize(H_spec)

    W = product_set(A_prime, H) if A_prime.card else GSet.empty(grp)
    symdiff = A.symmetric_difference(W)
    ratio = Fraction(symdiff.card, A.card)

    p, q = eps.numerator, eps.denominator
    checks = {
        "symdiff_le_eps": symdiff.card * q <= p * A.card,
        "aprime_large": A_prime.card * q >= (q - p) * A.card,
        "aprime_markov": 10 * q * A_prime.card >= (10 * q - p) * A.card,
        "w_in_a_plus_h": W.issubset(product_set(A, H)),
        "h_in_diff": H.issubset(quotient_set(A, A)),
        "bootstrap_valid": boot.all_valid,
    }

    D = parse_rational(dilate_D) if dilate_D is not None else Fraction(24 * max(m, 1)) / eps
    H_D = realize(dilate(H_spec, D))
    observables = {
        "sampler_mode": boot.sampler.mode,
        "sample_size": boot.sampler.sample_size,
        "T_size": T.card,
        "H_size": H.card,
        "H_D_size": H_D.card,
        "A_prime_size": A_prime.card,
        "W_size": W.card,
        "worst_bootstrap_deviation": boot.worst_deviation,
    }
    if W.card:
        counts = skew_convolve_counts(A, H_D).values
        min_count = int(min(int(counts[x]) for x in W.indices.tolist()))
        observables["dilate_min_density"] = Fraction(min_count, H_D.card)
        observables["dilate_density_ok"] = q * min_count >= (q - p) * H_D.card
    else:
        observables["dilate_min_density"] = None
        observables["dilate_density_ok"] = True

    return RegularityDecomposition(
        epsilon=eps,
        nu=nu,
        delta=delta,
        bootstrap=boot,
        T=T,
        H_spec=H_spec,
        H=H,
        A_prime=A_prime,
        W=W,
        symdiff_ratio=ratio,
        rank=H_spec.rank,
        tau=tau,
        dilate_D=D,
        checks=checks,
        observables=observables,
        seed=int(seed),
    )


def regularity_subspace(
    A: GSet,
    eps,
    seed: int = 0,
    c_sample=DEFAULT_C_SAMPLE,
    retries: int = DEFAULT_RETRIES,
    threads: int = 1,
    scope: Optional[GSet] = None,
    dilate_D=None,
    sample_cap: Optional[int] = DEFAULT_SAMPLE_CAP,
) -> RegularityDecomposition:
    """Vector-space decomposition: nu = 0 makes H an explicit subspace.

    W is then automatically a union of H-cosets; the basis, codimension and
    the density of A on every coset meeting A or W are reported alongside
    the generic checks.
    """
    grp = A.group
    if not isinstance(grp, VectorSpaceGroup):
        raise RegularityError("regularity_subspace needs a vector-space group F_p^n")
    dec = regularity_bohr(
        A,
        eps,
        0,
        seed=seed,
        c_sample=c_sample,
        retries=retries,
        threads=threads,
        scope=scope,
        dilate_D=dilate_D,
        sample_cap=sample_cap,
    )
    H = dec.H
    if not is_subgroup(grp, H.indices):
        raise RegularityError(
            "radius-0 Bohr set failed the subgroup axioms; this indicates a bug"
        )
    basis = grp.basis_of_indices(H.indices)
    codim = grp.n - len(basis)

    densities = []
    seen = np.zeros(grp.order, dtype=bool)
    for x in sorted(set(A.indices.tolist()) | set(dec.W.indices.tolist())):
        if seen[x]:
            continue
        coset = grp.translate_indices(x, H.indices, "left")
        seen[coset] = True
        rep = int(coset.min())
        inter = int(A.mask[coset].sum())
        densities.append((rep, Fraction(inter, H.card), bool(dec.W.mask[rep])))

    checks = dict(dec.checks)
    checks["h_is_subspace"] = True
    checks["w_union_of_cosets"] = (
        dec.W.card == 0 or np.array_equal(product_set(dec.W, H).indices, dec.W.indices)
    )
    return dataclasses.replace(
        dec,
        checks=checks,
        basis=tuple(tuple(int(v) for v in row) for row in basis),
        codimension=codim,
        coset_densities=tuple(densities),
    )


# -- difference-set extraction -----------------------------------------------------------


@dataclass(frozen=True)
class BogolyubovReport:
    """A Bohr set certified (or honestly reported) to sit inside A - A."""

    spec: BohrSpec
    realized: GSet
    rank: int
    radius: Fraction
    contained: bool
    all_strong: bool
    min_representation: Fraction
    offender: Optional[int]
    bootstrap: BohrPeriodReport
    seed: int

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "realized": self.realized.to_dict(),
            "rank": self.rank,
            "radius": format_rational(self.radius),
            "contained": self.contained,
            "all_strong": self.all_strong,
            "min_representation": format_rational(self.min_representation),
            "offender": self.offender,
            "bootstrap": self.bootstrap.to_dict(),
            "seed": self.seed,
        }


def _representation_profile(A: GSet, members: np.ndarray) -> tuple[bool, bool, Fraction, Optional[int]]:
    """Strong/weak membership of each candidate in A - A, by exact counts."""
    counts = skew_convolve_counts(A, A).values
    contained = True
    all_strong = True
    min_rep = Fraction(1)
    offender = None
    for t in members.tolist():
        c = int(counts[t])
        rep = Fraction(c, A.card)
        if rep < min_rep:
            min_rep = rep
        if c < 1:
            contained = False
        if 2 * c < A.card:
            all_strong = False
            if offender is None:
                offender = int(t)
    return contained, all_strong, min_rep, offender


def bogolyubov_bohr(
    A: GSet,
    seed: int = 0,
    c_sample=DEFAULT_C_SAMPLE,
    retries: int = DEFAULT_RETRIES,
    threads: int = 1,
    sample_cap: Optional[int] = DEFAULT_SAMPLE_CAP,
) -> BogolyubovReport:
    """Find a Bohr set inside A - A via the eps = 1/2 bootstrap.

    Each realized element t is checked exactly for the two-sided witness
    2|A intersect (t+A)| >= |A|, which pins t in A - A with many
    representations; a failure is reported with the offender, not raised.
    """
    if A.card == 0:
        raise SetError("bogolyubov_bohr requires a nonempty set")
    boot = bootstrap_bohr_periods(
        A,
        A,
        Fraction(1, 2),
        seed=seed,
        c_sample=c_sample,
        retries=retries,
        threads=threads,
        sample_cap=sample_cap,
    )
    realized = realize(boot.spec)
    contained, strong, min_rep, offender = _representation_profile(A, realized.indices)
    return BogolyubovReport(
        spec=boot.spec,
        realized=realized,
        rank=boot.rank,
        radius=boot.radius,
        contained=contained,
        all_strong=strong,
        min_representation=min_rep,
        offender=offender,
        bootstrap=boot,
        seed=int(seed),
    )


@dataclass(frozen=True)
class SubspaceExtraction:
    """A subspace certified inside A - A, directly or through a model."""

    V: GSet
    basis: tuple
    codimension: int
    contained: bool
    all_strong: bool
    offender: Optional[int]
    mode: str
    bootstrap: BohrPeriodReport
    seed: int
    model: Optional[ModelEmbedding] = None
    image_V: Optional[GSet] = None
    pullback_checks: Optional[dict] = None

    def to_dict(self) -> dict:
        out = {
            "V": self.V.to_dict(),
            "basis": [list(row) for row in self.basis],
            "codimension": self.codimension,
            "contained": self.contained,
            "all_strong": self.all_strong,
            "offender": self.offender,
            "mode": self.mode,
            "bootstrap": self.bootstrap.to_dict(),
            "seed": self.seed,
        }
        if self.model is not None:
            out["model"] = self.model.to_dict()
            out["image_V"] = self.image_V.to_dict()
            out["pullback_checks"] = dict(self.pullback_checks)
        return out


def _difference_transport(phi, V_img: GSet) -> tuple[GSet, dict]:
    """Pull a subset of phi(A) - phi(A) back through differences of pairs.

    An order >= 2 isomorphism acts on differences one difference class at a
    time; the transport is rebuilt from all |A|^2 pairs with an explicit
    well-definedness check rather than trusting the certificate.
    """
    A = phi.domain
    grp = A.group
    cod = phi.codomain.group
    img_a = phi.image_array()
    fwd: dict = {}
    for a2, fa2 in zip(A.indices.tolist(), img_a.tolist()):
        ds = grp.translate_indices(grp.inv(a2), A.indices, "left")
        es = cod.translate_indices(cod.inv(fa2), img_a, "left")
        for d, e in zip(ds.tolist(), es.tolist()):
            prev = fwd.setdefault(d, e)
            if prev != e:
                raise RegularityError(
                    "difference transport is not well defined; the modelling "
                    "certificate forbids this, so this indicates a bug"
                )
    members = [d for d, e in fwd.items() if V_img.mask[e]]
    hits = sum(1 for e in fwd.values() if V_img.mask[e])
    stats = {"pairs_classes": len(fwd), "image_hits": hits}
    return GSet.from_indices(grp, members), stats


def bogolyubov_subspace(
    A: GSet,
    seed: int = 0,
    mode: str = "dense",
    s: int = 4,
    c_sample=DEFAULT_C_SAMPLE,
    retries: int = DEFAULT_RETRIES,
    threads: int = 1,
    max_attempts: int = 200,
    sample_cap: Optional[int] = DEFAULT_SAMPLE_CAP,
) -> SubspaceExtraction:
    """Extract a subspace of A - A, either in place or through a model.

    dense: take the frequency kernel of the eps = 1/2 bootstrap, a subspace
    contained in every Bohr set over the same frequencies.  doubling: first
    compress A into F_p^m by an order-s model (s >= 4 so that differences
    transport), extract there, and pull the subspace back through the
    difference classes; the pullback is re-certified as a subspace of the
    source and checked element by element against A - A.
    """
    grp = A.group
    if not isinstance(grp, VectorSpaceGroup):
        raise RegularityError("bogolyubov_subspace needs a vector-space group F_p^n")
    if A.card == 0:
        raise SetError("bogolyubov_subspace requires a nonempty set")
    if mode not in ("dense", "doubling"):
        raise RegularityError(f"mode must be 'dense' or 'doubling', not {mode!r}")

    if mode == "dense":
        boot = bootstrap_bohr_periods(
            A, A, Fraction(1, 2), seed=seed, c_sample=c_sample,
            retries=retries, threads=threads, sample_cap=sample_cap,
        )
        V = subgroup_inside(boot.spec)
        contained, strong, _, offender = _representation_profile(A, V.indices)
        basis = grp.basis_of_indices(V.indices)
        return SubspaceExtraction(
            V=V,
            basis=tuple(tuple(int(v) for v in row) for row in basis),
            codimension=grp.n - len(basis),
            contained=contained,
            all_strong=strong,
            offender=offender,
            mode="dense",
            bootstrap=boot,
            seed=int(seed),
        )

    if int(s) < 2:
        raise RegularityError(f"doubling mode needs order s >= 2, got {s}")
    emb = model_embed(A, s=int(s), seed=seed, max_attempts=max_attempts)
    C = emb.fmap.codomain
    boot = bootstrap_bohr_periods(
        C, C, Fraction(1, 2), seed=seed, c_sample=c_sample,
        retries=retries, threads=threads, sample_cap=sample_cap,
    )
    V_img = subgroup_inside(boot.spec)
    img_contained, img_strong, _, _ = _representation_profile(C, V_img.indices)

    H, stats = _difference_transport(emb.fmap, V_img)
    diff = quotient_set(A, A)
    h_subspace = is_subgroup(grp, H.indices)
    if not h_subspace:
        raise RegularityError(
            "pulled-back set failed the subspace axioms; the order-s model "
            "guarantees them, so this indicates a bug"
        )
    contained, strong, _, offender = _representation_profile(A, H.indices)
    basis = grp.basis_of_indices(H.indices)
    pullback_checks = {
        "image_contained": img_contained,
        "image_all_strong": img_strong,
        "h_is_subspace": h_subspace,
        "sizes_match": H.card == V_img.card,
        "h_in_diff": H.issubset(diff),
        **stats,
    }
    return SubspaceExtraction(
        V=H,
        basis=tuple(tuple(int(v) for v in row) for row in basis),
        codimension=grp.n - len(basis),
        contained=contained,
        all_strong=strong,
        offender=offender,
        mode="doubling",
        bootstrap=boot,
        seed=int(seed),
        model=emb,
        image_V=V_img,
        pullback_checks=pullback_checks,
    )
