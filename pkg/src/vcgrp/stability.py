"""Order-property witnesses and stability testing.

A k-order witness is a pair of tuples a_1..a_k, b_1..b_k anywhere in the
group with a_i * b_j in A exactly when i <= j.  The search walks b-tuples
left to right, keeping one candidate bitmask per already-pinned row plus a
reservoir mask for the rows still to come; every reported witness is
re-verified against the full k x k membership table.  Exhausting the tree
proves stability, exhausting the node budget returns an explicit unknown.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .groups import Group, GroupError
from .sets import GSet, SetError
from .vc import VCResult, vcd_global

DEFAULT_NODE_BUDGET = 10**7


class _BudgetExceeded(Exception):
    pass


@dataclass(frozen=True)
class StabilityWitness:
    """Tuples realizing the k-order pattern, with the table check recorded."""

    k: int
    a: tuple
    b: tuple
    verified: bool

    def to_dict(self) -> dict:
        return {"k": self.k, "a": list(self.a), "b": list(self.b), "verified": self.verified}


def verify_witness(A: GSet, a, b) -> bool:
    """Exhaustive k x k check of a_i * b_j in A iff i <= j."""
    grp = A.group
    a = [grp.check_element(x) for x in a]
    b = [grp.check_element(x) for x in b]
    if len(a) != len(b) or not a:
        return False
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            if bool(A.mask[grp.op(ai, bj)]) != (i <= j):
                return False
    return True


def make_witness(A: GSet, a, b) -> StabilityWitness:
    a = tuple(int(x) for x in a)
    b = tuple(int(x) for x in b)
    return StabilityWitness(k=len(a), a=a, b=b, verified=verify_witness(A, a, b))


def staircase_witness(A: GSet, k: int) -> StabilityWitness:
    """The witness a_i = i-1, b_j = k-j for an interval [0, k) in a cyclic group."""
    return make_witness(A, range(k), range(k - 1, -1, -1))


@dataclass(frozen=True)
class OrderSearchResult:
    """Tri-state outcome: witness found, proven absent, or budget ran out."""

    status: str
    witness: Optional[StabilityWitness]
    nodes: int
    budget: int

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "witness": self.witness.to_dict() if self.witness else None,
            "nodes": self.nodes,
            "budget": self.budget,
        }


def _column_masks(A: GSet) -> list[int]:
    """For each b, the bitmask over a of [a * b in A]."""
    grp = A.group
    amask = A.mask
    out = []
    for b in range(grp.order):
        col = amask[grp.perm_right(b)]
        out.append(int(sum(1 << i for i in np.flatnonzero(col).tolist())))
    return out


def find_order_witness(A: GSet, k: int, node_budget: int = DEFAULT_NODE_BUDGET) -> OrderSearchResult:
    """Search for a k-order witness by backtracking over the b-tuple.

    After fixing b_1..b_t the viable a_i form one mask per i <= t plus a
    shared reservoir for i > t (rows not yet split apart); a branch dies as
    soon as any mask empties.  Two b's with identical membership columns
    are interchangeable, so only the smallest representative is branched
    on.  Completed searches are proofs: status "none" means A is k-stable.
    """
    grp = A.group
    k = int(k)
    if k < 1:
        raise SetError(f"k must be >= 1, got {k}")
    budget = int(node_budget)
    if A.card == 0:
        return OrderSearchResult(status="none", witness=None, nodes=0, budget=budget)

    colmasks = _column_masks(A)
    reps: dict = {}
    for b in range(grp.order):
        reps.setdefault(colmasks[b], b)
    cand = sorted(reps.values())
    full = (1 << grp.order) - 1
    nodes = 0

    def descend(Cs: list, R: int) -> Optional[tuple]:
        nonlocal nodes
        t = len(Cs)
        for b in cand:
            nodes += 1
            if nodes > budget:
                raise _BudgetExceeded
            col = colmasks[b]
            c_new = R & col
            if c_new == 0:
                continue
            next_cs = []
            for c in Cs:
                c &= col
                if c == 0:
                    break
                next_cs.append(c)
            else:
                next_cs.append(c_new)
                if t + 1 == k:
                    return (next_cs, (b,))
                r_new = R & ~col
                if r_new == 0:
                    continue
                deeper = descend(next_cs, r_new)
                if deeper is not None:
                    return (deeper[0], (b,) + deeper[1])
        return None

    try:
        found = descend([], full)
    except _BudgetExceeded:
        return OrderSearchResult(status="unknown", witness=None, nodes=nodes, budget=budget)

    if found is None:
        return OrderSearchResult(status="none", witness=None, nodes=nodes, budget=budget)
    masks, bs = found
    a_tuple = tuple((c & -c).bit_length() - 1 for c in masks)
    witness = make_witness(A, a_tuple, bs)
    if not witness.verified:
        raise GroupError(
            "search produced an unverifiable witness; the propagation masks "
            "forbid this, so this indicates a bug"
        )
    return OrderSearchResult(status="witness", witness=witness, nodes=nodes, budget=budget)


@dataclass(frozen=True)
class StabilityReport:
    k: int
    status: str
    witness: Optional[StabilityWitness]
    nodes: int
    budget: int

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "status": self.status,
            "witness": self.witness.to_dict() if self.witness else None,
            "nodes": self.nodes,
            "budget": self.budget,
        }


def is_k_stable(A: GSet, k: int, node_budget: int = DEFAULT_NODE_BUDGET) -> StabilityReport:
    """Tri-state stability: stable (proven), unstable (witness), or unknown."""
    r = find_order_witness(A, k, node_budget)
    status = {"witness": "unstable", "none": "stable", "unknown": "unknown"}[r.status]
    return StabilityReport(k=int(k), status=status, witness=r.witness,
                           nodes=r.nodes, budget=r.budget)


@dataclass(frozen=True)
class StabilityVcdReport:
    """Where the order property stops, against the global VC-dimension.

    The inequality vcd(G, A) <= k - 1 for a proven k-stable A is a theorem,
    so a violation raises instead of being recorded.
    """

    k_max: int
    statuses: tuple
    largest_witness_k: int
    witness: Optional[StabilityWitness]
    stable_from: Optional[int]
    vcd_global: VCResult
    relation_checked: bool

    def to_dict(self) -> dict:
        return {
            "k_max": self.k_max,
            "statuses": [list(s) for s in self.statuses],
            "largest_witness_k": self.largest_witness_k,
            "witness": self.witness.to_dict() if self.witness else None,
            "stable_from": self.stable_from,
            "vcd_global": self.vcd_global.dimension,
            "relation_checked": self.relation_checked,
        }


def stability_vcd_relation(
    A: GSet, k_max: int, node_budget: int = DEFAULT_NODE_BUDGET
) -> StabilityVcdReport:
    """Scan k = 1..k_max for witnesses and compare with vcd(G, A).

    A k-witness contains a (k-1)-witness, so the scan stops at the first k
    without one; when that absence is proven (not a budget timeout) the
    bound vcd(G, A) <= k - 1 is asserted.
    """
    if int(k_max) < 1:
        raise SetError(f"k_max must be >= 1, got {k_max}")
    if A.card == 0:
        raise SetError("stability_vcd_relation requires a nonempty set")
    statuses = []
    witness = None
    largest = 0
    stable_from = None
    for k in range(1, int(k_max) + 1):
        r = find_order_witness(A, k, node_budget)
        statuses.append((k, r.status))
        if r.status == "witness":
            largest = k
            witness = r.witness
            continue
        if r.status == "none":
            stable_from = k
        break

    vres = vcd_global(A)
    checked = False
    if stable_from is not None:
        checked = True
        if vres.dimension > stable_from - 1:
            raise GroupError(
                f"proven {stable_from}-stable set has vcd(G, A) = {vres.dimension} "
                f"> {stable_from - 1}; this indicates a bug"
            )
    return StabilityVcdReport(
        k_max=int(k_max),
        statuses=tuple(statuses),
        largest_witness_k=largest,
        witness=witness,
        stable_from=stable_from,
        vcd_global=vres,
        relation_checked=checked,
    )
