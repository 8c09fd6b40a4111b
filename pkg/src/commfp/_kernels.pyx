# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``.

``hnf_int64`` works in checked 64-bit arithmetic and raises OverflowError
when an intermediate leaves that range; callers then fall back to the
arbitrary-precision Python version. ``sis_paths`` reproduces the numpy
version bit-for-bit: identical operation order, no fast-math.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t
from libc.stdlib cimport malloc, free
from libc.string cimport memcpy, memset

cnp.import_array()

cdef extern from *:
    """
    static inline int cfp_mul(long long a, long long b, long long *r) { return __builtin_mul_overflow(a, b, r); }
    static inline int cfp_add(long long a, long long b, long long *r) { return __builtin_add_overflow(a, b, r); }
    static inline int cfp_sub(long long a, long long b, long long *r) { return __builtin_sub_overflow(a, b, r); }
    """
    int cfp_mul(long long a, long long b, long long *r) nogil
    int cfp_add(long long a, long long b, long long *r) nogil
    int cfp_sub(long long a, long long b, long long *r) nogil


cdef inline long long floordiv(long long a, long long b) noexcept nogil:
    cdef long long q = a / b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        q -= 1
    return q


cdef inline void xgcd(long long a, long long b, long long *g, long long *x, long long *y) noexcept nogil:
    cdef long long x0 = 1, y0 = 0, x1 = 0, y1 = 1, q, r, tmp
    while b != 0:
        q = floordiv(a, b)
        r = a - q * b
        a = b
        b = r
        tmp = x0 - q * x1
        x0 = x1
        x1 = tmp
        tmp = y0 - q * y1
        y0 = y1
        y1 = tmp
    if a < 0:
        a = -a
        x0 = -x0
        y0 = -y0
    g[0] = a
    x[0] = x0
    y[0] = y0


cdef int axpy(long long *dst, long long q, long long *src, Py_ssize_t start, Py_ssize_t N) noexcept nogil:
    """dst[c] -= q * src[c] for c >= start; returns 1 on overflow."""
    cdef Py_ssize_t c
    cdef long long prod
    for c in range(start, N):
        if src[c] == 0:
            continue
        if cfp_mul(q, src[c], &prod) or cfp_sub(dst[c], prod, &dst[c]):
            return 1
    return 0


cdef int reduce_row(long long *row, long long *basis, char *present, Py_ssize_t start, Py_ssize_t N) noexcept nogil:
    cdef Py_ssize_t k
    cdef long long q
    for k in range(start, N):
        if not present[k] or row[k] == 0:
            continue
        q = floordiv(row[k], basis[k * N + k])
        if q != 0 and axpy(row, q, basis + k * N, k, N):
            return 1
    return 0


cdef int hnf_core(const int64_t *gens, Py_ssize_t G, Py_ssize_t N,
                  long long *basis, char *present, long long *v, long long *nrow) noexcept nogil:
    cdef Py_ssize_t i, j, c
    cdef long long a, b, q, g, x, y, ag, bg, t1, t2, rc, vc
    cdef long long *row
    for i in range(G):
        for c in range(N):
            v[c] = gens[i * N + c]
        j = 0
        while j < N:
            if v[j] == 0:
                j += 1
                continue
            row = basis + j * N
            if not present[j]:
                if v[j] < 0:
                    for c in range(N):
                        v[c] = -v[c]
                if reduce_row(v, basis, present, j + 1, N):
                    return 1
                memcpy(row, v, N * sizeof(long long))
                present[j] = 1
                break
            a = row[j]
            b = v[j]
            if b % a == 0:
                q = b / a
                if axpy(v, q, row, j, N):
                    return 1
            else:
                xgcd(a, b, &g, &x, &y)
                ag = a / g
                bg = b / g
                memset(nrow, 0, N * sizeof(long long))
                for c in range(j, N):
                    rc = row[c]
                    vc = v[c]
                    if cfp_mul(x, rc, &t1) or cfp_mul(y, vc, &t2) or cfp_add(t1, t2, &nrow[c]):
                        return 1
                    if cfp_mul(ag, vc, &t1) or cfp_mul(bg, rc, &t2) or cfp_sub(t1, t2, &v[c]):
                        return 1
                if reduce_row(nrow, basis, present, j + 1, N):
                    return 1
                memcpy(row, nrow, N * sizeof(long long))
            j += 1
    # entries above each pivot into [0, pivot)
    for j in range(N):
        if not present[j]:
            continue
        for i in range(j):
            if not present[i]:
                continue
            q = floordiv(basis[i * N + j], basis[j * N + j])
            if q != 0 and axpy(basis + i * N, q, basis + j * N, j, N):
                return 1
    return 0


def hnf_int64(gens):
    """HNF of the span of the rows of ``gens`` in checked int64 arithmetic.

    Returns ``(basis, present)``: an ``(N, N)`` int64 array and a boolean
    mask of the columns that carry a pivot.
    """
    cdef cnp.ndarray[int64_t, ndim=2, mode="c"] g = np.ascontiguousarray(gens, dtype=np.int64)
    cdef Py_ssize_t G = g.shape[0], N = g.shape[1]
    cdef cnp.ndarray[long long, ndim=2, mode="c"] basis = np.zeros((N, N), dtype=np.longlong)
    cdef cnp.ndarray[char, ndim=1, mode="c"] present = np.zeros(N, dtype=np.int8)
    cdef long long *v = <long long *> malloc(max(N, 1) * sizeof(long long))
    cdef long long *nrow = <long long *> malloc(max(N, 1) * sizeof(long long))
    cdef int status
    if v == NULL or nrow == NULL:
        free(v)
        free(nrow)
        raise MemoryError()
    try:
        with nogil:
            status = hnf_core(<const int64_t *> g.data, G, N, <long long *> basis.data,
                              <char *> present.data, v, nrow)
    finally:
        free(v)
        free(nrow)
    if status:
        raise OverflowError("HNF intermediate exceeds 64-bit range")
    return basis.astype(np.int64), present.astype(bool)


cdef inline Py_ssize_t search_right(const double *cum, Py_ssize_t L, double u) noexcept nogil:
    """Smallest i with cum[i] > u, clipped to L - 1 (numpy searchsorted side='right')."""
    cdef Py_ssize_t lo = 0, hi = L, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if cum[mid] <= u:
            lo = mid + 1
        else:
            hi = mid
    if lo > L - 1:
        lo = L - 1
    return lo


cdef long long select_kth(long long *a, Py_ssize_t n, Py_ssize_t k) noexcept nogil:
    """k-th smallest of distinct keys (quickselect, in place)."""
    cdef Py_ssize_t lo = 0, hi = n - 1, i, j
    cdef long long pivot, tmp
    while hi > lo:
        pivot = a[(lo + hi) >> 1]
        i = lo
        j = hi
        while i <= j:
            while a[i] < pivot:
                i += 1
            while a[j] > pivot:
                j -= 1
            if i <= j:
                tmp = a[i]
                a[i] = a[j]
                a[j] = tmp
                i += 1
                j -= 1
        if k <= j:
            hi = j
        elif k >= i:
            lo = i
        else:
            return a[k]
    return a[k]


def sis_paths(deltas, p_true, p_sorted, cum_true, cum_sorted, uniforms, bint absorbing, Py_ssize_t zero_index):
    """Compiled twin of :func:`commfp._pykernels.sis_paths`."""
    cdef cnp.ndarray[int64_t, ndim=2, mode="c"] D = np.ascontiguousarray(deltas, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] pt = np.ascontiguousarray(p_true, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] ps = np.ascontiguousarray(p_sorted, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] ct = np.ascontiguousarray(cum_true, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] cs = np.ascontiguousarray(cum_sorted, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] U = np.ascontiguousarray(uniforms, dtype=np.float64)
    cdef Py_ssize_t L = D.shape[0], N = D.shape[1], M = U.shape[0], T = U.shape[1]
    cdef cnp.ndarray[double, ndim=1, mode="c"] out = np.zeros(M, dtype=np.float64)
    cdef long long *W = <long long *> malloc(max(N, 1) * sizeof(long long))
    cdef long long *keys = <long long *> malloc(max(L, 1) * sizeof(long long))
    cdef Py_ssize_t m, s, l, c, idx, rank, chosen
    cdef long long ip, key
    cdef double w
    cdef bint zero
    cdef const int64_t *dptr = <const int64_t *> D.data
    if W == NULL or keys == NULL:
        free(W)
        free(keys)
        raise MemoryError()
    with nogil:
        for m in range(M):
            idx = search_right(<const double *> ct.data, L, U[m, 0])
            for c in range(N):
                W[c] = dptr[idx * N + c]
            w = 1.0
            for s in range(1, T):
                zero = True
                for c in range(N):
                    if W[c] != 0:
                        zero = False
                        break
                if absorbing and zero:
                    w = w * pt[zero_index]
                    continue
                for l in range(L):
                    ip = 0
                    for c in range(N):
                        ip = ip + W[c] * dptr[l * N + c]
                    keys[l] = ip * L + l
                rank = search_right(<const double *> cs.data, L, U[m, s])
                key = select_kth(keys, L, rank)
                chosen = key % L
                if chosen < 0:
                    chosen += L
                w = w * (pt[chosen] / ps[rank])
                for c in range(N):
                    W[c] = W[c] + dptr[chosen * N + c]
            zero = True
            for c in range(N):
                if W[c] != 0:
                    zero = False
                    break
            out[m] = w if zero else 0.0
    free(W)
    free(keys)
    return out
