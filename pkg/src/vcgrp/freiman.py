"""Freiman isomorphisms, generalised progressions, and finite-field modelling.

A Freiman map is stored as an explicit bijection between two finite sets
that may live in different groups.  The checks in this module decide, by
exact enumeration over sum or quotient classes, whether such a bijection
respects the additive structure up to a given order s, and the modelling
routine compresses a subset of F_p^n into F_p^m with m as small as the
iterated difference set allows, certifying the result with the same checks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .groups import Group, VectorSpaceGroup, cyclic, gf_rank, make_group, vector_space
from .sets import GSet, SetError, iterate_product, quotient_set

# quadruple checks enumerate |A|*|B| quotient pairs
PAIR_CHECK_CAP = 10_000
# sum-class tables hold one entry per (source sum, image sum) pair
SUM_TABLE_CAP = 1 << 24
# direct s-tuple enumeration allowed up to |A|^s sums (|A|^(2s) tuple pairs)
TUPLE_ENUM_CAP = 10_000
GAP_VOLUME_CAP = 1_000_000
DEFAULT_MODEL_ATTEMPTS = 200
DEFAULT_MC_TRIALS = 20_000
# rng streams: default_rng([seed, tag, counter])
_MODEL_TAG = 151
_MC_TAG = 152


class FreimanError(ValueError):
    """Invalid map data, a size cap, or a failed modelling run."""


def _bijection_pairs(pairs) -> tuple[tuple[int, int], ...]:
    out = tuple((int(a), int(c)) for a, c in pairs)
    srcs = [a for a, _ in out]
    dsts = [c for _, c in out]
    if len(set(srcs)) != len(out) or len(set(dsts)) != len(out):
        raise FreimanError("mapping must be a bijection (repeated source or image)")
    return tuple(sorted(out))


@dataclass(frozen=True)
class FreimanMap:
    """Bijection between two group subsets, tagged with its intended order s."""

    domain: GSet
    codomain: GSet
    pairs: tuple
    s: int = 2
    _fwd: dict = field(init=False, repr=False, compare=False)
    _rev: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pairs = _bijection_pairs(self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if int(self.s) < 1:
            raise FreimanError(f"order s must be >= 1, got {self.s}")
        object.__setattr__(self, "s", int(self.s))
        fwd = dict(pairs)
        rev = {c: a for a, c in pairs}
        if set(fwd) != set(self.domain.indices.tolist()):
            raise FreimanError("mapping sources must equal the domain set")
        if set(rev) != set(self.codomain.indices.tolist()):
            raise FreimanError("mapping images must equal the codomain set")
        object.__setattr__(self, "_fwd", fwd)
        object.__setattr__(self, "_rev", rev)

    def apply(self, x: int) -> int:
        return self._fwd[int(x)]

    def invert(self, y: int) -> int:
        return self._rev[int(y)]

    def image_array(self) -> np.ndarray:
        """Images of the sorted domain indices, as int64."""
        return np.array([self._fwd[int(a)] for a in self.domain.indices], dtype=np.int64)

    def inverse_map(self) -> "FreimanMap":
        return FreimanMap(self.codomain, self.domain, tuple((c, a) for a, c in self.pairs), self.s)

    def to_dict(self) -> dict:
        return {
            "domain_group": self.domain.group.describe(),
            "codomain_group": self.codomain.group.describe(),
            "pairs": [list(p) for p in self.pairs],
            "s": self.s,
        }

    @staticmethod
    def from_dict(data: dict) -> "FreimanMap":
        dom_g = make_group(data["domain_group"])
        cod_g = make_group(data["codomain_group"])
        pairs = _bijection_pairs(data["pairs"])
        dom = GSet.from_indices(dom_g, [a for a, _ in pairs])
        cod = GSet.from_indices(cod_g, [c for _, c in pairs])
        return FreimanMap(dom, cod, pairs, int(data.get("s", 2)))


def map_via(A: GSet, fn: Callable[[int], int], codomain_group: Group, s: int = 2) -> FreimanMap:
    """Build the map a -> fn(a); fn must be injective on A."""
    pairs = tuple((int(a), codomain_group.check_element(fn(int(a)))) for a in A.indices)
    cod = GSet.from_indices(codomain_group, [c for _, c in pairs])
    return FreimanMap(A, cod, pairs, s)


def identity_map(A: GSet, s: int = 2) -> FreimanMap:
    return map_via(A, lambda a: a, A.group, s)


def translation_map(A: GSet, t: int, side: str = "left", s: int = 2) -> FreimanMap:
    grp = A.group
    t = grp.check_element(t)
    imgs = grp.translate_indices(t, A.indices, side)
    pairs = tuple(zip(A.indices.tolist(), imgs.tolist()))
    return FreimanMap(A, GSet.from_indices(grp, imgs), pairs, s)


# -- order-2 checks (any groups) -------------------------------------------------------


def two_isomorphism_violation(
    phi_A: FreimanMap, phi_B: Optional[FreimanMap] = None
) -> Optional[tuple]:
    """A quadruple (a1, b1, a2, b2) violating the quotient condition, or None.

    The condition is a1*b1^-1 = a2*b2^-1 iff the images satisfy the same
    relation.  Checked by classifying all |A|*|B| pairs by their quotient on
    each side: the map source-class -> image-class must be well defined and
    injective, and either failure yields an explicit quadruple.
    """
    if phi_B is None:
        phi_B = phi_A
    A, B = phi_A.domain, phi_B.domain
    grp = A.group
    if B.group != grp:
        raise FreimanError("phi_A and phi_B must share a source group")
    cod = phi_A.codomain.group
    if phi_B.codomain.group != cod:
        raise FreimanError("phi_A and phi_B must share an image group")
    if A.card * B.card > PAIR_CHECK_CAP:
        raise FreimanError(
            f"|A|*|B| = {A.card * B.card} exceeds the pair check cap {PAIR_CHECK_CAP}"
        )

    a_idx = A.indices
    img_a = phi_A.image_array()
    by_key: dict = {}
    by_val: dict = {}
    for b in B.indices.tolist():
        fb = phi_B.apply(b)
        keys = grp.translate_indices(grp.inv(b), a_idx, "right")
        vals = cod.translate_indices(cod.inv(fb), img_a, "right")
        for a, key, val in zip(a_idx.tolist(), keys.tolist(), vals.tolist()):
            prev = by_key.get(key)
            if prev is None:
                by_key[key] = (val, a, b)
            elif prev[0] != val:
                return (prev[1], prev[2], a, b)
            back = by_val.get(val)
            if back is None:
                by_val[val] = (key, a, b)
            elif back[0] != key:
                return (back[1], back[2], a, b)
    return None


def is_2_isomorphism_pair(phi_A: FreimanMap, phi_B: FreimanMap) -> bool:
    return two_isomorphism_violation(phi_A, phi_B) is None


def is_2_isomorphism(phi: FreimanMap) -> bool:
    return two_isomorphism_violation(phi) is None


# -- order-s checks (abelian groups) ----------------------------------------------------


@dataclass(frozen=True)
class IsoCheck:
    """Outcome of an order-s check.

    verified means the verdict is exact; a monte-carlo pass reports
    ok=True, verified=False ("no violation found"), while a monte-carlo
    violation is exact and carries the witness tuple pair.
    """

    ok: bool
    verified: bool
    method: str
    trials: int = 0
    witness: Optional[tuple] = None

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "verified": self.verified,
            "method": self.method,
            "trials": self.trials,
            "witness": list(self.witness) if self.witness is not None else None,
        }


def _sum_classes(phi: FreimanMap, s: int) -> np.ndarray:
    """Realized (source sum, image sum) pairs over all s-tuples, encoded."""
    grp = phi.domain.group
    cod = phi.codomain.group
    K = cod.order
    a_idx = phi.domain.indices
    img_a = phi.image_array()
    cur = np.unique(a_idx * K + img_a)
    for _ in range(s - 1):
        nxt = []
        g_part, c_part = cur // K, cur % K
        for a, fa in zip(a_idx.tolist(), img_a.tolist()):
            gs = grp.translate_indices(a, g_part, "left")
            cs = cod.translate_indices(fa, c_part, "left")
            nxt.append(gs * K + cs)
        cur = np.unique(np.concatenate(nxt))
    return cur


def is_s_isomorphism(
    phi: FreimanMap,
    s: Optional[int] = None,
    trials: int = DEFAULT_MC_TRIALS,
    seed: int = 0,
) -> IsoCheck:
    """Decide whether phi respects s-fold sums.

    The exact route classifies every s-tuple by its (source sum, image sum)
    pair; phi is an s-isomorphism iff that relation is a partial bijection.
    The class table has at most |G|*|G'| entries, so the enumeration runs in
    O(s |A| |G| |G'|) instead of |A|^(2s).  When the table would not fit,
    falls back to seeded random 2s-tuples and reports the weaker verdict.
    """
    grp = phi.domain.group
    cod = phi.codomain.group
    if not (grp.is_abelian and cod.is_abelian):
        raise FreimanError("order-s checks require abelian groups on both sides")
    if s is None:
        s = phi.s
    s = int(s)
    if s < 1:
        raise FreimanError(f"s must be >= 1, got {s}")
    if s == 1:
        return IsoCheck(ok=True, verified=True, method="exhaustive")

    if grp.order * cod.order <= SUM_TABLE_CAP:
        classes = _sum_classes(phi, s)
        K = cod.order
        g_part, c_part = classes // K, classes % K
        functional = len(np.unique(g_part)) == len(classes)
        injective = len(np.unique(c_part)) == len(classes)
        return IsoCheck(ok=bool(functional and injective), verified=True, method="exhaustive")

    if phi.domain.card**s <= TUPLE_ENUM_CAP:
        # small set in a large ambient product: walk the s-tuples directly
        seen: set = set()
        pairs_ac = [(int(a), phi.apply(int(a))) for a in phi.domain.indices]
        for combo in itertools.product(pairs_ac, repeat=s):
            gs, cs = combo[0]
            for a, fa in combo[1:]:
                gs = grp.op(gs, a)
                cs = cod.op(cs, fa)
            seen.add((gs, cs))
        functional = len({g for g, _ in seen}) == len(seen)
        injective = len({c for _, c in seen}) == len(seen)
        return IsoCheck(ok=functional and injective, verified=True, method="exhaustive")

    rng = np.random.default_rng([seed, _MC_TAG])
    a_idx = phi.domain.indices
    img_a = phi.image_array()

    def tuple_sums(picks: np.ndarray) -> tuple[int, int]:
        gs, cs = int(a_idx[picks[0]]), int(img_a[picks[0]])
        for p in picks[1:]:
            gs = grp.op(gs, int(a_idx[p]))
            cs = cod.op(cs, int(img_a[p]))
        return gs, cs

    for _ in range(int(trials)):
        picks = rng.integers(0, len(a_idx), size=2 * s)
        gu, cu = tuple_sums(picks[:s])
        gv, cv = tuple_sums(picks[s:])
        if (gu == gv) != (cu == cv):
            u = tuple(int(a_idx[p]) for p in picks[:s])
            v = tuple(int(a_idx[p]) for p in picks[s:])
            return IsoCheck(ok=False, verified=True, method="monte-carlo",
                            trials=int(trials), witness=(u, v))
    return IsoCheck(ok=True, verified=False, method="monte-carlo", trials=int(trials))


# -- the randomized modelling step ------------------------------------------------------


@dataclass(frozen=True)
class ModelEmbedding:
    """A compression of A into F_p^m certified as an order-s isomorphism."""

    m: int
    fmap: FreimanMap
    matrix: tuple
    s: int
    seed: int
    attempts: int
    rank_rejections: int
    diff_size: int
    bound_ok: bool
    check: IsoCheck

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "map": self.fmap.to_dict(),
            "matrix": [list(row) for row in self.matrix],
            "s": self.s,
            "seed": self.seed,
            "attempts": self.attempts,
            "rank_rejections": self.rank_rejections,
            "diff_size": self.diff_size,
            "bound_ok": self.bound_ok,
            "check": self.check.to_dict(),
        }


def model_embed(
    A: GSet,
    s: int = 2,
    seed: int = 0,
    max_attempts: int = DEFAULT_MODEL_ATTEMPTS,
) -> ModelEmbedding:
    """Model A inside F_p^m for the smallest m with p^m >= |sA - sA|.

    Samples uniform m x n matrices over F_p, keeps the full-rank ones, and
    accepts as soon as the kernel meets sA - sA only in 0; the restriction
    of the matrix map to A is then an s-isomorphism onto its image, which is
    re-certified exactly before returning.  Always p^m < p|sA - sA|.
    """
    grp = A.group
    if not isinstance(grp, VectorSpaceGroup):
        raise FreimanError("model_embed needs a vector-space group F_p^n")
    if A.card == 0:
        raise SetError("model_embed requires a nonempty set")
    s = int(s)
    if s < 1:
        raise FreimanError(f"s must be >= 1, got {s}")
    p, n = grp.p, grp.n

    sA = iterate_product(A, s)
    D = quotient_set(sA, sA)
    m = 0
    while p**m < D.card:
        m += 1
    target = vector_space(p, m)

    if m == 0:
        # |sA - sA| = 1 forces A to be a single point
        matrix = np.zeros((0, n), dtype=np.int64)
        attempts, rejections = 0, 0
    else:
        dvecs = grp.coords_matrix()[D.indices]
        nz = dvecs[D.indices != grp.identity]
        matrix = None
        rejections = 0
        attempts = 0
        for attempt in range(int(max_attempts)):
            attempts = attempt + 1
            rng = np.random.default_rng([seed, _MODEL_TAG, attempt])
            cand = rng.integers(0, p, size=(m, n), dtype=np.int64)
            if gf_rank(cand, p) < m:
                rejections += 1
                continue
            if not np.any(np.all((nz @ cand.T) % p == 0, axis=1)):
                matrix = cand
                break
        if matrix is None:
            raise FreimanError(
                f"no admissible matrix in {max_attempts} attempts "
                f"({rejections} rank rejections, m={m}, |sA-sA|={D.card})"
            )

    avecs = grp.coords_matrix()[A.indices]
    img_vecs = (avecs @ matrix.T) % p if m else np.zeros((A.card, 0), dtype=np.int64)
    weights = p ** np.arange(m, dtype=np.int64)
    img_idx = img_vecs @ weights if m else np.zeros(A.card, dtype=np.int64)
    pairs = tuple(zip(A.indices.tolist(), img_idx.tolist()))
    fmap = FreimanMap(A, GSet.from_indices(target, img_idx), pairs, s)

    check = is_s_isomorphism(fmap, s)
    if not (check.ok and check.verified):
        raise FreimanError(
            "accepted matrix failed the order-s certification; the kernel "
            "condition guarantees it, so this indicates a bug"
        )
    return ModelEmbedding(
        m=m,
        fmap=fmap,
        matrix=tuple(tuple(int(v) for v in row) for row in np.asarray(matrix)),
        s=s,
        seed=int(seed),
        attempts=attempts,
        rank_rejections=rejections,
        diff_size=D.card,
        bound_ok=p**m < p * D.card,
        check=check,
    )


# -- generalised arithmetic progressions ------------------------------------------------


@dataclass(frozen=True)
class GAPSpec:
    """Base point plus generators x_i walked 0..N_i-1 steps each."""

    group: Group
    base: int
    generators: tuple
    lengths: tuple

    def __post_init__(self):
        grp = self.group
        if not grp.is_abelian:
            raise FreimanError("progressions are defined over abelian groups")
        object.__setattr__(self, "base", grp.check_element(self.base))
        gens = tuple(grp.check_element(x) for x in self.generators)
        lens = tuple(int(N) for N in self.lengths)
        if len(gens) != len(lens):
            raise FreimanError("generators and lengths must align")
        if any(N < 1 for N in lens):
            raise FreimanError(f"lengths must be >= 1, got {lens}")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "lengths", lens)

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def volume(self) -> int:
        out = 1
        for N in self.lengths:
            out *= N
        return out

    def to_dict(self) -> dict:
        return {
            "group": self.group.describe(),
            "base": self.base,
            "generators": list(self.generators),
            "lengths": list(self.lengths),
        }


@dataclass(frozen=True)
class GAPRealization:
    spec: GAPSpec
    set: GSet
    proper: bool
    volume: int
    difference_set: Optional[GSet] = None
    difference_proper: Optional[bool] = None
    difference_volume: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "set": self.set.to_dict(),
            "proper": self.proper,
            "volume": self.volume,
            "difference_proper": self.difference_proper,
            "difference_volume": self.difference_volume,
        }


def _walk(grp: Group, base: int, generators, lengths) -> np.ndarray:
    """All sums base + sum lambda_i x_i with 0 <= lambda_i < N_i, as a multiset."""
    pts = np.array([base], dtype=np.int64)
    for x, N in zip(generators, lengths):
        layers = [pts]
        cur = pts
        for _ in range(N - 1):
            cur = grp.translate_indices(x, cur, "left")
            layers.append(cur)
        pts = np.concatenate(layers)
    return pts


def gap_realize(spec: GAPSpec, check_difference: bool = False) -> GAPRealization:
    """Enumerate the progression; proper iff all coefficient sums are distinct.

    With check_difference the symmetric box with legs 2N_i - 1 around 0 is
    enumerated too; as a set it always equals A - A, and its properness is
    recorded separately.
    """
    if spec.volume > GAP_VOLUME_CAP:
        raise FreimanError(f"volume {spec.volume} exceeds cap {GAP_VOLUME_CAP}")
    grp = spec.group
    pts = _walk(grp, spec.base, spec.generators, spec.lengths)
    uniq = np.unique(pts)
    realized = GSet.from_indices(grp, uniq)
    proper = len(uniq) == spec.volume

    diff_set = diff_proper = diff_volume = None
    if check_difference:
        diff_volume = 1
        for N in spec.lengths:
            diff_volume *= 2 * N - 1
        if diff_volume > GAP_VOLUME_CAP:
            raise FreimanError(f"difference volume {diff_volume} exceeds cap {GAP_VOLUME_CAP}")
        # rebase at -sum (N_i - 1) x_i so legs run 0..2N_i-2
        base_d = grp.identity
        for x, N in zip(spec.generators, spec.lengths):
            for _ in range(N - 1):
                base_d = grp.op(base_d, grp.inv(x))
        dpts = _walk(grp, base_d, spec.generators, tuple(2 * N - 1 for N in spec.lengths))
        duniq = np.unique(dpts)
        diff_set = GSet.from_indices(grp, duniq)
        diff_proper = len(duniq) == diff_volume
        if not np.array_equal(duniq, quotient_set(realized, realized).indices):
            raise FreimanError(
                "symmetric box disagrees with the realized difference set; "
                "this indicates a bug"
            )
    return GAPRealization(
        spec=spec,
        set=realized,
        proper=proper,
        volume=spec.volume,
        difference_set=diff_set,
        difference_proper=diff_proper,
        difference_volume=diff_volume,
    )


# -- integer sets via safe cyclic embeddings ---------------------------------------------


@dataclass(frozen=True)
class IntEmbedding:
    """Integer set shifted to start at 0 and reduced mod a safe modulus."""

    group: Group
    set: GSet
    offset: int
    modulus: int
    safe: bool

    def to_dict(self) -> dict:
        return {
            "group": self.group.describe(),
            "set": self.set.to_dict(),
            "offset": self.offset,
            "modulus": self.modulus,
            "safe": self.safe,
        }


def embed_int_set(xs: Sequence[int], modulus: Optional[int] = None) -> IntEmbedding:
    """Embed a finite set of integers into Z/M without folding differences.

    The default M = 2*width + 1 keeps every pairwise difference distinct mod
    M, so additive structure up to order 2 is preserved on the nose; with an
    explicit smaller modulus the safe flag records whether that still holds.
    """
    vals = sorted(set(int(x) for x in xs))
    if not vals:
        raise SetError("embed_int_set requires a nonempty collection")
    lo, width = vals[0], vals[-1] - vals[0]
    M = int(modulus) if modulus is not None else 2 * width + 1
    if M < width + 1:
        raise FreimanError(f"modulus {M} cannot hold a width-{width} set injectively")
    grp = cyclic(M)
    shifted = [v - lo for v in vals]
    gset = GSet.from_indices(grp, shifted)
    int_diffs = {a - b for a, b in itertools.product(vals, repeat=2)}
    safe = quotient_set(gset, gset).card == len(int_diffs)
    return IntEmbedding(group=grp, set=gset, offset=lo, modulus=M, safe=safe)
