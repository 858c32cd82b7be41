"""Constructors for the structured test sets used across experiments.

Everything here is deterministic given its arguments; randomized
constructors split their stream off a master seed the same way the
samplers do, so a config plus one integer reproduces every instance.
"""

from __future__ import annotations

import itertools
from typing import Optional, Sequence

import numpy as np

from .freiman import GAPSpec, gap_realize
from .groups import CyclicProductGroup, Group, GroupError, VectorSpaceGroup, gf_rank
from .sets import GSet, SetError
from .util import parse_rational

_RNG_TAG = 153
BOX_CAP = 1_000_000


def ap(group: Group, start: int, step: int, length: int) -> GSet:
    """Progression start, start+step, ..., of the given length (indices)."""
    if length < 1:
        raise SetError(f"length must be >= 1, got {length}")
    x = group.check_element(start)
    step = group.check_element(step)
    out = [x]
    for _ in range(length - 1):
        x = group.op(x, step)
        out.append(x)
    got = GSet.from_indices(group, out)
    if got.card != length:
        raise SetError(f"progression of length {length} collapsed to {got.card} points")
    return got


def ap_union(group: Group, start: int, step: int, length: int, translates: Sequence[int]) -> GSet:
    """Union of translates t + AP; the blocks may overlap."""
    base = ap(group, start, step, length)
    out = base
    for t in translates:
        out = out.union(base.translate(group.check_element(t)))
    return out


def box(group: CyclicProductGroup, lengths: Sequence[int], corner: Optional[Sequence[int]] = None) -> GSet:
    """Axis-aligned box of the given side lengths, one per modulus."""
    if not isinstance(group, CyclicProductGroup):
        raise GroupError("box sets need a cyclic-product group")
    lens = [int(L) for L in lengths]
    if len(lens) != len(group.moduli):
        raise SetError(f"expected {len(group.moduli)} side lengths, got {len(lens)}")
    if any(L < 1 for L in lens):
        raise SetError(f"side lengths must be >= 1, got {lens}")
    vol = 1
    for L in lens:
        vol *= L
    if vol > BOX_CAP:
        raise SetError(f"box volume {vol} exceeds cap {BOX_CAP}")
    base = list(corner) if corner is not None else [0] * len(lens)
    idx = [
        group.index_of([b + o for b, o in zip(base, offs)])
        for offs in itertools.product(*(range(L) for L in lens))
    ]
    return GSet.from_indices(group, idx)


def gap(group: Group, base: int, generators: Sequence[int], lengths: Sequence[int]) -> GSet:
    return gap_realize(GAPSpec(group, base, tuple(generators), tuple(lengths))).set


def random_set(group: Group, density, seed: int) -> GSet:
    """Uniform sample without replacement of floor(density * |G|) points (>= 1)."""
    density = parse_rational(density)
    if not (0 < density <= 1):
        raise SetError(f"density must lie in (0, 1], got {density}")
    size = max(1, int(density * group.order))
    rng = np.random.default_rng([seed, _RNG_TAG])
    idx = rng.choice(group.order, size=size, replace=False)
    return GSet.from_indices(group, idx)


def subgroup_union(group: Group, subgroup: GSet, reps: Sequence[int]) -> GSet:
    """Union of left translates rep * H; rep 0 gives H itself."""
    out = None
    for r in reps:
        t = subgroup.translate(group.check_element(r), side="left")
        out = t if out is None else out.union(t)
    if out is None:
        raise SetError("subgroup_union needs at least one representative")
    return out


def random_subspace(group: VectorSpaceGroup, dim: int, seed: int) -> GSet:
    """Span of dim random independent vectors."""
    if not isinstance(group, VectorSpaceGroup):
        raise GroupError("random_subspace needs a vector-space group")
    dim = int(dim)
    if not 0 <= dim <= group.n:
        raise SetError(f"dim must lie in [0, {group.n}], got {dim}")
    if dim == 0:
        return GSet.from_indices(group, [0])
    for attempt in itertools.count():
        rng = np.random.default_rng([seed, _RNG_TAG, attempt])
        mat = rng.integers(0, group.p, size=(dim, group.n), dtype=np.int64)
        if gf_rank(mat, group.p) == dim:
            return GSet.from_indices(group, group.span_indices([row.tolist() for row in mat]))
        if attempt > 200:
            raise GroupError(f"no rank-{dim} matrix found in 200 draws")


def random_coset_union(group: VectorSpaceGroup, codim: int, count: int, seed: int) -> GSet:
    """Union of count distinct cosets of a random codim-codim subspace."""
    sub = random_subspace(group, group.n - int(codim), seed)
    index = group.order // sub.card
    count = int(count)
    if not 1 <= count <= index:
        raise SetError(f"count must lie in [1, {index}], got {count}")
    rng = np.random.default_rng([seed, _RNG_TAG, 10**6])
    reps: list[int] = []
    seen = set()
    while len(reps) < count:
        x = int(rng.integers(0, group.order))
        key = int(group.translate_indices(x, sub.indices, "left").min())
        if key not in seen:
            seen.add(key)
            reps.append(key)
    return subgroup_union(group, sub, reps)


def build_set(group: Group, descriptor: dict) -> GSet:
    """Dispatch on descriptor["kind"]; the vocabulary mirrors the config format."""
    kind = descriptor.get("kind")
    d = descriptor
    if kind == "explicit":
        if "elements_coords" in d:
            return GSet.from_coords(group, d["elements_coords"])
        return GSet.from_indices(group, d["elements"])
    if kind == "random":
        return random_set(group, d["density"], int(d["seed"]))
    if kind == "ap":
        return ap(group, int(d.get("start", 0)), int(d.get("step", 1)), int(d["length"]))
    if kind == "ap_union":
        return ap_union(group, int(d.get("start", 0)), int(d.get("step", 1)),
                        int(d["length"]), [int(t) for t in d.get("translates", [])])
    if kind == "gap":
        return gap(group, int(d.get("base", 0)), d["generators"], d["lengths"])
    if kind == "box":
        return box(group, d["lengths"], d.get("corner"))
    if kind == "subgroup_union":
        if "basis" in d:
            sub = GSet.from_indices(group, group.span_indices(d["basis"]))
        else:
            sub = GSet.from_indices(group, d["subgroup_elements"])
        return subgroup_union(group, sub, d.get("reps", [0]))
    if kind == "random_coset_union":
        return random_coset_union(group, int(d["codim"]), int(d["count"]), int(d["seed"]))
    if kind == "full":
        return GSet.full(group)
    raise SetError(f"unknown set generator kind {kind!r}")
