"""VC dimension of translate families on finite groups.

For subsets A, B of a group G the family of left-translate intersections
{A intersect x*B : x in A*B^-1} is viewed as a set system on ground set A;
its VC dimension is the quantity computed here.  Scopes:

* restricted -- ground A, translates over x in A*B^-1 (the default pair
  dimension).
* global     -- ground G, translates x*B over all x in G.
* right      -- ground A, right translates B*x over x in B^-1*A.

The exact search walks shattered sets depth first (a set can only be
shattered if all its subsets are), on one representative per distinct
membership column, which loses no shattered sets and keeps witnesses
lexicographically least.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from . import kernels
from .sets import GSet, SetError, product_set, quotient_set

MAX_SHATTER_SIZE = 30
DEFAULT_CAP = 10

SCOPES = ("restricted", "global", "right")


@dataclass(frozen=True)
class SetFamily:
    """A finite set system over the positions of a ground GSet.

    members hold bitmasks over ground positions (bit i = ground.indices[i]).
    """

    ground: GSet
    member_masks: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.member_masks)

    @property
    def ground_size(self) -> int:
        return self.ground.card

    def member_indices(self, j: int) -> list[int]:
        gidx = self.ground.indices
        mask = self.member_masks[j]
        out = []
        while mask:
            low = mask & -mask
            out.append(int(gidx[low.bit_length() - 1]))
            mask ^= low
        return out

    @classmethod
    def from_sets(cls, ground: GSet, members: Iterable[GSet], dedup: bool = True) -> "SetFamily":
        pos = {int(g): i for i, g in enumerate(ground.indices.tolist())}
        masks = []
        seen = set()
        for m in members:
            if m.group != ground.group:
                raise SetError("family member lives in a different group")
            bits = 0
            for e in m.indices.tolist():
                p = pos.get(int(e))
                if p is None:
                    raise SetError("family member is not a subset of the ground set")
                bits |= 1 << p
            if dedup:
                if bits in seen:
                    continue
                seen.add(bits)
            masks.append(bits)
        return cls(ground=ground, member_masks=tuple(masks))


@dataclass(frozen=True)
class VCResult:
    dimension: int
    witness: Optional[tuple[int, ...]]
    reached_cap: bool
    cap: int
    family_size: int
    ground_size: int

    @property
    def dimension_str(self) -> str:
        return f">= {self.dimension}" if self.reached_cap else str(self.dimension)

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "dimension_str": self.dimension_str,
            "witness": list(self.witness) if self.witness is not None else None,
            "reached_cap": self.reached_cap,
            "cap": self.cap,
            "family_size": self.family_size,
            "ground_size": self.ground_size,
        }


def translate_family(A: GSet, B: GSet, scope: str = "restricted") -> SetFamily:
    """The set system of translate intersections for the requested scope."""
    if scope not in SCOPES:
        raise ValueError(f"scope must be one of {SCOPES}, got {scope!r}")
    if A.card == 0 or B.card == 0:
        raise SetError("translate_family requires nonempty sets")
    if A.group != B.group:
        raise SetError("sets live in different groups")
    g = A.group
    if scope == "global":
        ground = GSet.full(g)
        xs = ground.indices.tolist()
        members = (B.translate(x, side="left") for x in xs)
        return SetFamily.from_sets(ground, members)
    if scope == "restricted":
        xs = quotient_set(A, B).indices.tolist()
        members = (A.intersect(B.translate(x, side="left")) for x in xs)
        return SetFamily.from_sets(A, members)
    # right: translates B*x over x in B^-1*A
    xs = product_set(B.inverse(), A).indices.tolist()
    members = (A.intersect(B.translate(x, side="right")) for x in xs)
    return SetFamily.from_sets(A, members)


def _columns(family: SetFamily) -> list[int]:
    """Per-position membership columns: bit j of col[p] = p in member j."""
    cols = [0] * family.ground_size
    for j, mask in enumerate(family.member_masks):
        bit = 1 << j
        while mask:
            low = mask & -mask
            cols[low.bit_length() - 1] |= bit
            mask ^= low
    return cols


def _shattered_by_columns(cols: Sequence[int], positions: Sequence[int], full: int) -> bool:
    """All 2^k membership patterns over the chosen positions are realized."""
    k = len(positions)
    for pattern in range(1 << k):
        cur = full
        for i in range(k):
            c = cols[positions[i]]
            cur &= c if (pattern >> i) & 1 else full ^ c
            if not cur:
                break
        if not cur:
            return False
    return True


def shatters(family: SetFamily, X: Union[GSet, Iterable[int]]) -> bool:
    """Exact shattering test; refuses |X| > 30."""
    if isinstance(X, GSet):
        elems = X.indices.tolist()
    else:
        elems = sorted({int(x) for x in X})
    if len(elems) > MAX_SHATTER_SIZE:
        raise ValueError(f"|X| = {len(elems)} exceeds the shattering limit {MAX_SHATTER_SIZE}")
    if family.size == 0:
        return False  # the empty family realizes no trace, not even on the empty set
    pos_of = {int(g): i for i, g in enumerate(family.ground.indices.tolist())}
    try:
        positions = [pos_of[e] for e in elems]
    except KeyError as exc:
        raise SetError(f"element {exc.args[0]} is not in the ground set") from None
    cols = _columns(family)
    full = (1 << family.size) - 1
    return _shattered_by_columns(cols, positions, full)


def vc_dimension(family: SetFamily, cap: int = DEFAULT_CAP) -> VCResult:
    """Exact VC dimension by depth-first search over shattered sets.

    Positions with identical membership columns cannot appear together in a
    shattered set, and constant columns appear in none, so the search runs
    over one representative per distinct nonconstant column (the smallest
    ground index, keeping reported witnesses lexicographically least).
    """
    if cap < 0:
        raise ValueError("cap must be >= 0")
    if family.size == 0:
        return VCResult(-1, None, False, cap, 0, family.ground_size)

    cols = _columns(family)
    full = (1 << family.size) - 1
    rep: dict[int, int] = {}
    for p, c in enumerate(cols):  # ascending p: first hit is the smallest index
        if c != 0 and c != full and c not in rep:
            rep[c] = p
    candidates = sorted(rep.values())
    gidx = family.ground.indices
    if not candidates:
        return VCResult(0, (), False, cap, family.size, family.ground_size)

    n_words = (family.size + 63) // 64
    packed = np.empty((len(candidates), n_words), dtype=np.uint64)
    for i, p in enumerate(candidates):
        packed[i] = np.frombuffer(cols[p].to_bytes(8 * n_words, "little"), dtype=np.uint64)
    dim, wit_ranks, certain = kernels.vc_search(packed, family.size, cap)

    reached_cap = dim == cap and not certain
    return VCResult(
        dimension=dim,
        witness=tuple(int(gidx[candidates[r]]) for r in wit_ranks),
        reached_cap=reached_cap,
        cap=cap,
        family_size=family.size,
        ground_size=family.ground_size,
    )


def vcd(A: GSet, B: Optional[GSet] = None, scope: str = "restricted", cap: int = DEFAULT_CAP) -> VCResult:
    """vcd(A, B): VC dimension of {A intersect x*B : x in A*B^-1} on ground A.

    B defaults to A.  scope='right' gives the right-translate variant.
    """
    if B is None:
        B = A
    return vc_dimension(translate_family(A, B, scope=scope), cap=cap)


def vcd_self(A: GSet, cap: int = DEFAULT_CAP) -> VCResult:
    return vcd(A, A, cap=cap)


def vcd_global(A: GSet, cap: int = DEFAULT_CAP) -> VCResult:
    """vcd(G, A): translates x*A over all of G, ground G."""
    return vc_dimension(translate_family(GSet.full(A.group), A, scope="restricted"), cap=cap)


def vcdr(A: GSet, B: Optional[GSet] = None, cap: int = DEFAULT_CAP) -> VCResult:
    """Right variant: family {A intersect B*x : x in B^-1*A} on ground A."""
    if B is None:
        B = A
    return vcd(A, B, scope="right", cap=cap)
