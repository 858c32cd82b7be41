# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan kernels: translate-deviation maxima and goodness tests.

Contracts match _kernels_py; callers guarantee int64 safety of all
intermediate products.  Loops release the GIL and exit early where the
result permits.
"""

import numpy as np

cimport numpy as cnp
from cython.parallel cimport prange

cnp.import_array()

BACKEND = "cython"


def max_abs_diff_rows(const cnp.int64_t[::1] f, const cnp.int64_t[:, ::1] perms):
    cdef Py_ssize_t nrows = perms.shape[0]
    cdef Py_ssize_t n = perms.shape[1]
    out_arr = np.empty(nrows, dtype=np.int64)
    cdef cnp.int64_t[::1] out = out_arr
    cdef Py_ssize_t i, x
    cdef cnp.int64_t best, d
    with nogil:
        for i in range(nrows):
            best = 0
            for x in range(n):
                d = f[perms[i, x]] - f[x]
                if d < 0:
                    d = -d
                if d > best:
                    best = d
            out[i] = best
    return out_arr


def rows_all_within(
    const cnp.int64_t[::1] h,
    const cnp.int64_t[::1] f,
    const cnp.int64_t[:, ::1] perms,
    cnp.int64_t ch,
    cnp.int64_t cf,
    cnp.int64_t bound,
):
    cdef Py_ssize_t nrows = perms.shape[0]
    cdef Py_ssize_t n = perms.shape[1]
    out_arr = np.empty(nrows, dtype=np.uint8)
    cdef cnp.uint8_t[::1] out = out_arr
    cdef Py_ssize_t i, x
    cdef cnp.int64_t d
    cdef bint ok
    with nogil:
        for i in range(nrows):
            ok = True
            for x in range(n):
                d = ch * h[perms[i, x]] - cf * f[x]
                if d < 0:
                    d = -d
                if d > bound:
                    ok = False
                    break
            out[i] = 1 if ok else 0
    return out_arr


def convolve_counts(
    const cnp.int64_t[::1] f,
    const cnp.int64_t[::1] g_idx,
    const cnp.int64_t[::1] g_vals,
    const cnp.int64_t[:, ::1] perms,
):
    cdef Py_ssize_t nsupp = g_idx.shape[0]
    cdef Py_ssize_t n = f.shape[0]
    out_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] out = out_arr
    cdef Py_ssize_t j, x
    cdef cnp.int64_t v
    with nogil:
        for j in range(nsupp):
            v = g_vals[j]
            for x in range(n):
                out[x] += v * f[perms[j, x]]
    return out_arr


def vc_search(const cnp.uint64_t[:, ::1] cols, Py_ssize_t n_members, Py_ssize_t cap):
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
    cdef Py_ssize_t n_cand = cols.shape[0]
    cdef Py_ssize_t W = cols.shape[1]
    if n_members <= 0:
        raise ValueError("n_members must be positive")
    if cap < 0:
        raise ValueError("cap must be >= 0")
    if n_cand == 0:
        return 0, (), True
    if cap == 0:
        return 0, (), False

    # 2^k disjoint nonempty cells need 2^k <= n_members, so depth is capped
    # by log2 of the family size as well as by the search cap itself.
    cdef Py_ssize_t eff = 0
    while eff < cap and eff < n_cand and eff + 1 < 63 and ((<cnp.uint64_t>1) << (eff + 1)) <= <cnp.uint64_t>n_members:
        eff += 1
    if eff == 0:
        return 0, (), True

    # cells of the current path node at depth d live in rows
    # [2^d - 1, 2^(d+1) - 2] of one flat buffer
    buf_arr = np.zeros(((1 << (eff + 1)) - 1, W), dtype=np.uint64)
    cdef cnp.uint64_t[:, ::1] buf = buf_arr
    path_arr = np.zeros(eff + 1, dtype=np.int64)
    best_arr = np.zeros(eff + 1, dtype=np.int64)
    start_arr = np.zeros(eff + 2, dtype=np.int64)
    cdef cnp.int64_t[::1] path = path_arr
    cdef cnp.int64_t[::1] best_path = best_arr
    cdef cnp.int64_t[::1] start = start_arr

    cdef Py_ssize_t fw = n_members >> 6
    cdef Py_ssize_t rem = n_members & 63
    cdef Py_ssize_t w
    for w in range(fw):
        buf[0, w] = ~(<cnp.uint64_t>0)
    if rem:
        buf[0, fw] = (~(<cnp.uint64_t>0)) >> (64 - rem)

    cdef Py_ssize_t depth = 0, best_dim = 0, r, i, ncells, po, co
    cdef cnp.uint64_t x, a, b, nz_a, nz_b
    cdef bint certain = True, ok, moved
    with nogil:
        while True:
            moved = False
            if depth < eff:
                r = start[depth]
                po = (1 << depth) - 1
                co = (1 << (depth + 1)) - 1
                ncells = 1 << depth
                while r < n_cand:
                    ok = True
                    for i in range(ncells):
                        nz_a = 0
                        nz_b = 0
                        for w in range(W):
                            x = buf[po + i, w]
                            a = x & cols[r, w]
                            b = x ^ a
                            buf[co + 2 * i, w] = a
                            buf[co + 2 * i + 1, w] = b
                            nz_a |= a
                            nz_b |= b
                        if nz_a == 0 or nz_b == 0:
                            ok = False
                            break
                    if ok:
                        break
                    r += 1
                if r < n_cand:
                    path[depth] = r
                    start[depth] = r + 1
                    depth += 1
                    start[depth] = r + 1
                    if depth > best_dim:
                        best_dim = depth
                        for i in range(depth):
                            best_path[i] = path[i]
                        if best_dim == cap:
                            certain = False
                            break
                    moved = True
            if moved:
                continue
            if depth == 0:
                break
            depth -= 1
    witness = tuple(int(best_path[i]) for i in range(best_dim))
    return best_dim, witness, bool(certain)
