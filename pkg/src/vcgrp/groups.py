"""Finite groups over integer element indices 0..order-1.

Three kinds are supported:

* ``cyclic_product`` -- Z/m_1 x ... x Z/m_k with mixed-radix indexing,
  least significant factor first: index = x_1 + m_1*(x_2 + m_2*(...)).
* ``vector_space`` -- F_p^n, a cyclic product with uniform prime modulus
  plus linear-algebra helpers.
* ``table`` -- arbitrary finite group given by its Cayley table,
  validated exhaustively on construction.

For abelian groups the dual group is indexed by the same mixed-radix
scheme; characters evaluate exactly as root-of-unity exponents a/L with
L the group exponent.
"""

from __future__ import annotations

import cmath
import json
import math
from functools import lru_cache
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np


class GroupError(ValueError):
    """Invalid group data or out-of-domain element."""


class CharValue(NamedTuple):
    """An exact root of unity e^(2*pi*i*num/den) with a float approximation."""

    num: int
    den: int
    approx: complex


def _as_index(x) -> int:
    if isinstance(x, (bool, float)):
        raise GroupError(f"element index must be an integer, got {x!r}")
    return int(x)


class Group:
    """Base class; concrete groups provide op/inv/identity over indices."""

    order: int
    is_abelian: bool
    kind: str

    def check_element(self, x) -> int:
        xi = _as_index(x)
        if not 0 <= xi < self.order:
            raise GroupError(f"element {x!r} outside 0..{self.order - 1}")
        return xi

    def op(self, x: int, y: int) -> int:
        raise NotImplementedError

    def inv(self, x: int) -> int:
        raise NotImplementedError

    @property
    def identity(self) -> int:
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError

    # -- vectorized action ------------------------------------------------

    def perm_left(self, t: int) -> np.ndarray:
        """Permutation array p with p[x] = t*x."""
        raise NotImplementedError

    def perm_right(self, t: int) -> np.ndarray:
        """Permutation array p with p[x] = x*t."""
        raise NotImplementedError

    def inv_perm(self) -> np.ndarray:
        """Array p with p[x] = x^-1."""
        raise NotImplementedError

    def translate_indices(self, t: int, idx: np.ndarray, side: str = "left") -> np.ndarray:
        """Indices of t*y (or y*t) for y in idx."""
        if side == "left":
            return self.perm_left(t)[idx]
        if side == "right":
            return self.perm_right(t)[idx]
        raise ValueError(f"side must be 'left' or 'right', not {side!r}")

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    def __eq__(self, other) -> bool:
        return isinstance(other, Group) and self.describe() == other.describe()

    def __hash__(self) -> int:
        return hash(json.dumps(self.describe(), sort_keys=True))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.describe()})"


class CyclicProductGroup(Group):
    """Direct product of cyclic groups Z/m_1 x ... x Z/m_k."""

    kind = "cyclic_product"
    is_abelian = True

    def __init__(self, moduli: Sequence[int]):
        moduli = tuple(int(m) for m in moduli)
        if not moduli:
            raise GroupError("at least one modulus required")
        if any(m < 1 for m in moduli):
            raise GroupError(f"moduli must be >= 1, got {moduli}")
        self.moduli = moduli
        self.order = math.prod(moduli)
        self.exponent = math.lcm(*moduli)
        # mixed-radix place values, least significant factor first
        weights = [1]
        for m in moduli[:-1]:
            weights.append(weights[-1] * m)
        self._weights = np.array(weights, dtype=np.int64)
        self._moduli_arr = np.array(moduli, dtype=np.int64)
        self._coords_cache: Optional[np.ndarray] = None

    # -- indexing ----------------------------------------------------------

    def coords(self, x: int) -> tuple[int, ...]:
        v = self.check_element(x)
        out = []
        for m in self.moduli:
            v, r = divmod(v, m)
            out.append(r)
        return tuple(out)

    def index_of(self, coords: Sequence[int]) -> int:
        if len(coords) != len(self.moduli):
            raise GroupError(f"expected {len(self.moduli)} coordinates, got {len(coords)}")
        idx = 0
        for c, m, w in zip(coords, self.moduli, self._weights.tolist()):
            idx += (int(c) % m) * w
        return idx

    def coords_matrix(self) -> np.ndarray:
        """(order, k) matrix of coordinates; cached."""
        if self._coords_cache is None:
            v = np.arange(self.order, dtype=np.int64)
            cols = []
            for m in self.moduli:
                v, r = np.divmod(v, m)
                cols.append(r)
            mat = np.stack(cols, axis=1)
            mat.setflags(write=False)
            self._coords_cache = mat
        return self._coords_cache

    # -- group law ----------------------------------------------------------

    def op(self, x: int, y: int) -> int:
        x, y = self.check_element(x), self.check_element(y)
        cx, cy = self.coords(x), self.coords(y)
        return self.index_of([a + b for a, b in zip(cx, cy)])

    def inv(self, x: int) -> int:
        return self.index_of([-c for c in self.coords(x)])

    @property
    def identity(self) -> int:
        return 0

    def perm_left(self, t: int) -> np.ndarray:
        t = self.check_element(t)
        ct = np.array(self.coords(t), dtype=np.int64)
        summed = (self.coords_matrix() + ct) % self._moduli_arr
        return summed @ self._weights

    def perm_right(self, t: int) -> np.ndarray:
        return self.perm_left(t)

    def inv_perm(self) -> np.ndarray:
        neg = (-self.coords_matrix()) % self._moduli_arr
        return neg @ self._weights

    def translate_indices(self, t: int, idx: np.ndarray, side: str = "left") -> np.ndarray:
        t = self.check_element(t)
        if side not in ("left", "right"):
            raise ValueError(f"side must be 'left' or 'right', not {side!r}")
        ct = np.array(self.coords(t), dtype=np.int64)
        summed = (self.coords_matrix()[np.asarray(idx, dtype=np.int64)] + ct) % self._moduli_arr
        return summed @ self._weights

    # -- dual group and characters -------------------------------------------

    def dual_add(self, g1: int, g2: int) -> int:
        return self.op(g1, g2)

    def dual_neg(self, g: int) -> int:
        return self.inv(g)

    def char_rootnum(self, gamma: int, x: int) -> int:
        """Exponent numerator a with gamma(x) = e^(2*pi*i*a/exponent)."""
        gamma, x = self.check_element(gamma), self.check_element(x)
        L = self.exponent
        a = 0
        for g, c, m in zip(self.coords(gamma), self.coords(x), self.moduli):
            a += g * c * (L // m)
        return a % L

    def char_rootnums(self, gamma: int) -> np.ndarray:
        """Exponent numerators of gamma over all of G, as int64[order]."""
        gamma = self.check_element(gamma)
        L = self.exponent
        cg = np.array(self.coords(gamma), dtype=np.int64)
        scale = L // self._moduli_arr
        return (self.coords_matrix() @ (cg * scale)) % L

    def char_eval(self, gamma: int, x: int) -> CharValue:
        a = self.char_rootnum(gamma, x)
        L = self.exponent
        g = math.gcd(a, L) if a else L
        num, den = (a // g, L // g) if a else (0, 1)
        return CharValue(num, den, cmath.exp(2j * cmath.pi * a / L))

    def describe(self) -> dict:
        return {"kind": "cyclic_product", "moduli": list(self.moduli)}


class VectorSpaceGroup(CyclicProductGroup):
    """F_p^n; adds vector views and GF(p) spans."""

    kind = "vector_space"

    def __init__(self, p: int, n: int):
        p, n = int(p), int(n)
        if p < 2 or not _is_prime(p):
            raise GroupError(f"p must be prime, got {p}")
        if n < 0:
            raise GroupError(f"n must be >= 0, got {n}")
        if n == 0:
            # trivial space: a single zero vector
            super().__init__((1,))
        else:
            super().__init__((p,) * n)
        self.p = p
        self.n = n

    def vector(self, x: int) -> np.ndarray:
        if self.n == 0:
            return np.zeros(0, dtype=np.int64)
        return np.array(self.coords(x), dtype=np.int64)

    def index_of_vector(self, vec: Sequence[int]) -> int:
        if self.n == 0:
            return 0
        return self.index_of(list(vec))

    def span_indices(self, basis: Sequence[Sequence[int]]) -> np.ndarray:
        """Sorted element indices of the span of the given vectors."""
        members = {0}
        for vec in basis:
            vi = self.index_of_vector(vec)
            new = set()
            for s in members:
                acc = s
                for _ in range(self.p - 1):
                    acc = self.op(acc, vi)
                    new.add(acc)
            members |= new
        return np.array(sorted(members), dtype=np.int64)

    def basis_of_indices(self, idx: Iterable[int]) -> np.ndarray:
        """A GF(p) basis (rows) for the subspace spanned by the elements."""
        if self.n == 0:
            return np.zeros((0, 0), dtype=np.int64)
        vecs = np.array([self.vector(i) for i in idx], dtype=np.int64)
        if len(vecs) == 0:
            return np.zeros((0, self.n), dtype=np.int64)
        rref, pivots = gf_rref(vecs, self.p)
        return rref[: len(pivots)]

    def describe(self) -> dict:
        return {"kind": "vector_space", "p": self.p, "n": self.n}


class TableGroup(Group):
    """Group given by an explicit Cayley table table[x][y] = x*y."""

    kind = "table"

    def __init__(self, table: Sequence[Sequence[int]], name: Optional[str] = None):
        arr = np.asarray(table, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise GroupError(f"table must be square, got shape {arr.shape}")
        n = arr.shape[0]
        if n == 0:
            raise GroupError("empty table")
        if arr.min() < 0 or arr.max() >= n:
            bad = np.argwhere((arr < 0) | (arr >= n))[0]
            raise GroupError(
                f"closure fails: table[{bad[0]}][{bad[1]}] = {arr[bad[0], bad[1]]} "
                f"is outside 0..{n - 1}"
            )
        self.order = n
        self.table = arr
        self.name = name
        self._identity = self._find_identity()
        self._inv = self._find_inverses()
        self._check_associativity()
        self.is_abelian = bool(np.array_equal(arr, arr.T))
        self.table.setflags(write=False)

    def _find_identity(self) -> int:
        rng = np.arange(self.order)
        for e in range(self.order):
            if np.array_equal(self.table[e], rng) and np.array_equal(self.table[:, e], rng):
                return e
        raise GroupError("no identity element: no row e with table[e][y]=y and table[x][e]=x")

    def _find_inverses(self) -> np.ndarray:
        e = self._identity
        inv = np.full(self.order, -1, dtype=np.int64)
        for x in range(self.order):
            ys = np.flatnonzero(self.table[x] == e)
            ok = [y for y in ys if self.table[y, x] == e]
            if not ok:
                raise GroupError(f"no two-sided inverse for element {x}")
            inv[x] = ok[0]
        return inv

    def _check_associativity(self) -> None:
        A = self.table
        # chunked over x to keep memory at O(order^2)
        for x in range(self.order):
            left = A[A[x], :]        # (y, z) -> (x*y)*z
            right = A[x][A]          # (y, z) -> x*(y*z)
            if not np.array_equal(left, right):
                y, z = np.argwhere(left != right)[0]
                raise GroupError(
                    f"associativity fails at ({x},{y},{z}): "
                    f"({x}*{y})*{z} = {left[y, z]} but {x}*({y}*{z}) = {right[y, z]}"
                )

    def op(self, x: int, y: int) -> int:
        return int(self.table[self.check_element(x), self.check_element(y)])

    def inv(self, x: int) -> int:
        return int(self._inv[self.check_element(x)])

    @property
    def identity(self) -> int:
        return int(self._identity)

    def perm_left(self, t: int) -> np.ndarray:
        return self.table[self.check_element(t), :]

    def perm_right(self, t: int) -> np.ndarray:
        return self.table[:, self.check_element(t)]

    def inv_perm(self) -> np.ndarray:
        return self._inv

    def char_rootnum(self, gamma: int, x: int) -> int:
        raise GroupError("characters require an abelian group given in product form")

    def describe(self) -> dict:
        d = {"kind": "table", "table": self.table.tolist()}
        if self.name:
            d["name"] = self.name
        return d


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


# -- constructors -------------------------------------------------------------


def cyclic(n: int) -> CyclicProductGroup:
    return CyclicProductGroup((n,))


def cyclic_product(moduli: Sequence[int]) -> CyclicProductGroup:
    return CyclicProductGroup(tuple(moduli))


def vector_space(p: int, n: int) -> VectorSpaceGroup:
    return VectorSpaceGroup(p, n)


def from_table(table: Sequence[Sequence[int]], name: Optional[str] = None) -> TableGroup:
    return TableGroup(table, name=name)


@lru_cache(maxsize=None)
def symmetric_group(n: int) -> TableGroup:
    """S_n as a table group; elements are permutations in lexicographic order."""
    if not 1 <= n <= 5:
        raise GroupError("symmetric_group supports 1 <= n <= 5")
    import itertools

    perms = list(itertools.permutations(range(n)))
    pos = {p: i for i, p in enumerate(perms)}
    size = len(perms)
    table = [[0] * size for _ in range(size)]
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            table[i][j] = pos[tuple(p[q[t]] for t in range(n))]
    return TableGroup(table, name=f"S{n}")


@lru_cache(maxsize=None)
def dihedral_group(n: int) -> TableGroup:
    """D_n of order 2n; index i + n*j encodes r^i s^j."""
    if n < 1:
        raise GroupError("dihedral_group needs n >= 1")

    def mul(a, b):
        i1, j1 = a % n, a // n
        i2, j2 = b % n, b // n
        if j1 == 0:
            return (i1 + i2) % n + n * j2
        return (i1 - i2) % n + n * (1 - j2)

    table = [[mul(a, b) for b in range(2 * n)] for a in range(2 * n)]
    return TableGroup(table, name=f"D{n}")


def make_group(descriptor) -> Group:
    """Build a group from a JSON descriptor (dict or JSON string)."""
    if isinstance(descriptor, Group):
        return descriptor
    if isinstance(descriptor, str):
        descriptor = json.loads(descriptor)
    if not isinstance(descriptor, dict) or "kind" not in descriptor:
        raise GroupError(f"group descriptor must be a dict with 'kind', got {descriptor!r}")
    kind = descriptor["kind"]
    if kind == "cyclic":
        return CyclicProductGroup([descriptor["n"]])
    if kind == "cyclic_product":
        return CyclicProductGroup(descriptor["moduli"])
    if kind == "vector_space":
        return VectorSpaceGroup(descriptor["p"], descriptor["n"])
    if kind == "symmetric":
        return symmetric_group(descriptor["n"])
    if kind == "dihedral":
        return dihedral_group(descriptor["n"])
    if kind == "table":
        return TableGroup(descriptor["table"], name=descriptor.get("name"))
    raise GroupError(f"unknown group kind {kind!r}")


# -- structural predicates ----------------------------------------------------


def is_subgroup(group: Group, indices: Iterable[int]) -> bool:
    """Exact check that the given elements form a subgroup."""
    idx = sorted({group.check_element(i) for i in indices})
    if not idx:
        return False
    mask = np.zeros(group.order, dtype=bool)
    mask[idx] = True
    if not mask[group.identity]:
        return False
    arr = np.array(idx, dtype=np.int64)
    if not mask[group.inv_perm()[arr]].all():
        return False
    for x in idx:
        if not mask[group.translate_indices(x, arr, side="left")].all():
            return False
    return True


def is_coset(group: Group, indices: Iterable[int]) -> bool:
    """True iff the set is a coset of some subgroup (left or right agree)."""
    idx = sorted({group.check_element(i) for i in indices})
    if not idx:
        return False
    a0inv = group.inv(idx[0])
    shifted = [group.op(x, a0inv) for x in idx]
    return is_subgroup(group, shifted)


# -- GF(p) linear algebra -------------------------------------------------------


def gf_rref(matrix: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Row-reduced echelon form over GF(p); returns (rref, pivot columns)."""
    m = np.array(matrix, dtype=np.int64) % p
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot = None
        for i in range(r, rows):
            if m[i, c] % p:
                pivot = i
                break
        if pivot is None:
            continue
        m[[r, pivot]] = m[[pivot, r]]
        inv = pow(int(m[r, c]), p - 2, p)
        m[r] = (m[r] * inv) % p
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] = (m[i] - m[i, c] * m[r]) % p
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def gf_rank(matrix: np.ndarray, p: int) -> int:
    return len(gf_rref(matrix, p)[1])
