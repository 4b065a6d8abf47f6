# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled int64 versions of the loops in ``_purekernels``.

Callers (see ``kernels``) guarantee that every intermediate fits in a
signed 64-bit integer; nothing here checks for overflow.
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t

cnp.import_array()


def scaled_endpoints(A, C, Q, D, T, Py_ssize_t count, Py_ssize_t depth):
    cdef Py_ssize_t m = len(A)
    cdef int64_t q = Q, d = D, t = T
    cdef int64_t[::1] a = np.asarray(A, dtype=np.int64)
    cdef int64_t[::1] c = np.asarray(C, dtype=np.int64)
    out_arr = np.empty(count, dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    if d < t:
        return out_arr[:0]
    # each of at most depth+1 levels leaves at most m children pending
    cdef Py_ssize_t cap = (depth + 2) * (m + 1)
    sl_arr = np.empty(cap, dtype=np.int64)
    sw_arr = np.empty(cap, dtype=np.int64)
    cdef int64_t[::1] sl = sl_arr
    cdef int64_t[::1] sw = sw_arr
    cdef Py_ssize_t top = 0, n = 0, s
    cdef int64_t L, W, w
    cdef bint bad = False
    with nogil:
        sl[0] = 0
        sw[0] = d
        top = 1
        while top > 0:
            top -= 1
            L = sl[top]
            W = sw[top]
            if n >= count or top + m >= cap:
                bad = True
                break
            out[n] = L
            n += 1
            s = m - 1
            while s >= 0:
                w = W * a[s] // q
                if w >= t:
                    sl[top] = L + W * c[s] // q
                    sw[top] = w
                    top += 1
                s -= 1
    if bad or n != count:
        raise RuntimeError(f"generated {n}{'+' if bad else ''} words, expected {count}")
    return out_arr


def discrepancy_fast(nums, D):
    cdef int64_t[::1] k = np.ascontiguousarray(nums, dtype=np.int64)
    cdef Py_ssize_t N = k.shape[0], i
    cdef int64_t d = D, dd, hi = 0, lo = 0, star = 0, s
    with nogil:
        for i in range(N):
            dd = (i + 1) * d - N * k[i]
            if i == 0 or dd > hi:
                hi = dd
            if i == 0 or dd < lo:
                lo = dd
            s = dd if dd > d - dd else d - dd
            if s > star:
                star = s
    return int(d + hi - lo), int(star), int(N) * int(d)


def discrepancy_bruteforce(nums, D):
    cands_arr = np.union1d(np.asarray(nums, dtype=np.int64), np.array([0, D], dtype=np.int64))
    mask = np.isin(cands_arr, np.asarray(nums, dtype=np.int64))
    cdef int64_t[::1] cands = cands_arr
    cdef cnp.uint8_t[::1] ispt = mask.astype(np.uint8)
    cdef Py_ssize_t M = cands.shape[0], i, j, N = len(nums), r
    cdef int64_t d = D
    below_arr = np.empty(M, dtype=np.int64)
    upto_arr = np.empty(M, dtype=np.int64)
    cdef int64_t[::1] below = below_arr
    cdef int64_t[::1] upto = upto_arr
    cdef int64_t c = 0, best = 0, star = 0, span, v, bi, ui, bj, uj
    cdef int64_t cnt[4]
    with nogil:
        for i in range(M):
            below[i] = c
            if ispt[i]:
                c += 1
            upto[i] = c
        for i in range(M):
            bi = below[i]
            ui = upto[i]
            v = (ui - bi) * d
            if v > best:
                best = v
            for j in range(i + 1, M):
                span = N * (cands[j] - cands[i])
                bj = below[j]
                uj = upto[j]
                cnt[0] = uj - bi
                cnt[1] = bj - bi
                cnt[2] = uj - ui
                cnt[3] = bj - ui
                for r in range(4):
                    v = cnt[r] * d - span
                    if v < 0:
                        v = -v
                    if v > best:
                        best = v
        for j in range(M):
            v = below[j] * d - N * cands[j]
            if v < 0:
                v = -v
            if v > star:
                star = v
            v = upto[j] * d - N * cands[j]
            if v < 0:
                v = -v
            if v > star:
                star = v
    return int(best), int(star), int(N) * int(d)
