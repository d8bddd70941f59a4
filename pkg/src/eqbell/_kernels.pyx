# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures match ``eqbell._kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, int32_t, int8_t

cnp.import_array()

IMPLEMENTATION = "cython"


cdef inline int popcount64(uint64_t v) nogil:
    return __builtin_popcountll(v)


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


def rgs_labelings(int n, int max_blocks):
    """All restricted-growth strings of length n with at most max_blocks blocks."""
    if n < 1 or max_blocks < 1:
        return np.zeros((0, max(n, 0)), dtype=np.int8)
    cdef int i, v, hi
    cdef int[:] s = np.zeros(n, dtype=np.int32)
    cdef int[:] top = np.zeros(n, dtype=np.int32)
    # iterative odometer over restricted-growth strings
    cdef int8_t[:, :] buf
    cdef Py_ssize_t cap = 1024, filled = 0
    arr = np.empty((cap, n), dtype=np.int8)
    buf = arr
    for i in range(n):
        s[i] = 0
        top[i] = 0
    while True:
        if filled == cap:
            cap *= 2
            new = np.empty((cap, n), dtype=np.int8)
            new[:filled] = arr[:filled]
            arr = new
            buf = arr
        for i in range(n):
            buf[filled, i] = <int8_t>s[i]
        filled += 1
        # advance
        i = n - 1
        while i >= 1:
            hi = top[i - 1] + 1
            if hi > max_blocks - 1:
                hi = max_blocks - 1
            if s[i] < hi:
                s[i] += 1
                top[i] = top[i - 1] if top[i - 1] > s[i] else s[i]
                break
            i -= 1
        if i < 1:
            break
        for v in range(i + 1, n):
            s[v] = 0
            top[v] = top[v - 1]
    return arr[:filled].copy()


def pattern_matrix(cnp.ndarray labels_in, cnp.ndarray node_idx_in, cnp.ndarray lut_in):
    """Partition index of the outcome pattern for each (strategy, input tuple)."""
    cdef int8_t[:, :] labels = np.ascontiguousarray(labels_in, dtype=np.int8)
    cdef int64_t[:, :] node_idx = np.ascontiguousarray(node_idx_in, dtype=np.int64)
    cdef int32_t[:] lut = np.ascontiguousarray(lut_in, dtype=np.int32)
    cdef Py_ssize_t S = labels.shape[0], X = node_idx.shape[0], n = node_idx.shape[1]
    out = np.empty((S, X), dtype=np.int32)
    cdef int32_t[:, :] res = out
    cdef Py_ssize_t s, x, i, j
    cdef int bit, mask
    with nogil:
        for s in range(S):
            for x in range(X):
                mask = 0
                bit = 0
                for i in range(n):
                    for j in range(i + 1, n):
                        if labels[s, node_idx[x, i]] == labels[s, node_idx[x, j]]:
                            mask |= 1 << bit
                        bit += 1
                res[s, x] = lut[mask]
    return out


def dd_adjacent_pairs(cnp.ndarray zero_sets, cnp.ndarray pos_in, cnp.ndarray neg_in, int min_common):
    """Combinatorial adjacency test of the double description method.

    ``zero_sets[r]`` is the bitset of constraints tight at ray r. A pair
    (p, q) is adjacent when their common tight set has at least
    ``min_common`` members and no third ray is tight on all of it.
    """
    cdef uint64_t[:, :] Z = np.ascontiguousarray(zero_sets, dtype=np.uint64)
    cdef int64_t[:] pos = np.ascontiguousarray(pos_in, dtype=np.int64)
    cdef int64_t[:] neg = np.ascontiguousarray(neg_in, dtype=np.int64)
    cdef Py_ssize_t R = Z.shape[0], W = Z.shape[1]
    cdef Py_ssize_t a, b, r, w, p, q
    cdef int cnt, ok, contained
    cdef uint64_t[::1] inter = np.zeros(max(W, 1), dtype=np.uint64)
    cdef Py_ssize_t cap = 1024, filled = 0
    arr = np.empty((cap, 2), dtype=np.int64)
    cdef int64_t[:, :] buf = arr
    for a in range(pos.shape[0]):
        p = pos[a]
        for b in range(neg.shape[0]):
            q = neg[b]
            cnt = 0
            for w in range(W):
                inter[w] = Z[p, w] & Z[q, w]
                cnt += popcount64(inter[w])
            if cnt < min_common:
                continue
            ok = 1
            for r in range(R):
                if r == p or r == q:
                    continue
                contained = 1
                for w in range(W):
                    if (Z[r, w] & inter[w]) != inter[w]:
                        contained = 0
                        break
                if contained:
                    ok = 0
                    break
            if ok:
                if filled == cap:
                    cap *= 2
                    new = np.empty((cap, 2), dtype=np.int64)
                    new[:filled] = arr[:filled]
                    arr = new
                    buf = arr
                buf[filled, 0] = p
                buf[filled, 1] = q
                filled += 1
    return arr[:filled].copy()
