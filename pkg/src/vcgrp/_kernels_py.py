"""Pure-numpy fallback for the scan kernels.

Same contracts as the compiled extension: all inputs are int64 arrays and
callers guarantee the intermediate products fit in int64.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def max_abs_diff_rows(f: np.ndarray, perms: np.ndarray) -> np.ndarray:
    """For each row p of perms, max_x |f[p[x]] - f[x]|."""
    diff = f[perms]
    diff -= f[np.newaxis, :]
    np.abs(diff, out=diff)
    return diff.max(axis=1)


def rows_all_within(
    h: np.ndarray,
    f: np.ndarray,
    perms: np.ndarray,
    ch: int,
    cf: int,
    bound: int,
) -> np.ndarray:
    """For each row p of perms, whether max_x |ch*h[p[x]] - cf*f[x]| <= bound."""
    lhs = h[perms]
    lhs *= ch
    lhs -= cf * f[np.newaxis, :]
    np.abs(lhs, out=lhs)
    return (lhs.max(axis=1) <= bound).astype(np.uint8)


def convolve_counts(f: np.ndarray, g_idx: np.ndarray, g_vals: np.ndarray, perms: np.ndarray) -> np.ndarray:
    """out[x] = sum_j g_vals[j] * f[perms[j][x]] for support rows perms.

    Used for exact convolution against a sparse right factor: perms[j] maps x
    to the element whose f-value multiplies g_vals[j] in the sum at x.
    """
    out = np.zeros(f.shape[0], dtype=np.int64)
    for j in range(len(g_idx)):
        out += g_vals[j] * f[perms[j]]
    return out


def vc_search(cols: np.ndarray, n_members: int, cap: int) -> tuple:
    """Largest shattered subset of the candidate columns, by preorder DFS.

    cols is a (n_cand, n_words) uint64 array; row r is the membership bitset
    of candidate r over the family members, packed little-endian (bit j of
    word w = member 64*w + j, unused high bits zero).  A candidate set S is
    shattered when splitting the member set by each column of S in turn
    leaves all 2^|S| cells nonempty, so the search extends a shattered set
    one column at a time, splitting the parent's cells and backtracking on
    the first empty half.

    Returns (dim, witness, certain): witness is the lexicographically least
    shattered set of size dim as ascending candidate ranks, and certain is
    False when the search stopped at the cap rather than exhausting.
    """
    n_cand = int(cols.shape[0])
    if n_members <= 0:
        raise ValueError("n_members must be positive")
    if cap < 0:
        raise ValueError("cap must be >= 0")
    if n_cand == 0:
        return 0, (), True
    if cap == 0:
        return 0, (), False
    packed = np.ascontiguousarray(cols, dtype=np.uint64)
    col_ints = [int.from_bytes(packed[r].tobytes(), "little") for r in range(n_cand)]
    full = (1 << n_members) - 1

    # 2^k disjoint nonempty cells need 2^k <= n_members, so depth is capped
    # by log2 of the family size as well as by the search cap itself.
    eff = 0
    while eff < cap and eff < n_cand and (1 << (eff + 1)) <= n_members:
        eff += 1

    path: list = []
    cells_stack: list = [[full]]
    start_stack: list = [0]
    best_dim = 0
    witness: tuple = ()
    certain = True
    while True:
        depth = len(path)
        advanced = False
        if depth < eff:
            cells = cells_stack[-1]
            r = start_stack[-1]
            nxt: list = []
            while r < n_cand:
                c = col_ints[r]
                nxt = []
                ok = True
                for cell in cells:
                    a = cell & c
                    if a == 0 or a == cell:
                        ok = False
                        break
                    nxt.append(a)
                    nxt.append(cell ^ a)
                if ok:
                    break
                r += 1
            if r < n_cand:
                path.append(r)
                start_stack[-1] = r + 1
                cells_stack.append(nxt)
                start_stack.append(r + 1)
                if len(path) > best_dim:
                    best_dim = len(path)
                    witness = tuple(path)
                    if best_dim == cap:
                        certain = False
                        break
                advanced = True
        if advanced:
            continue
        if not path:
            break
        path.pop()
        cells_stack.pop()
        start_stack.pop()
    return best_dim, witness, certain
