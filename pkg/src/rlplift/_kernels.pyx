# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in color refinement and the float simplex."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport qsort, malloc, free
from libc.stdint cimport int64_t
from cpython.bytes cimport PyBytes_FromStringAndSize

BACKEND = "cython"


cdef int _cmp(const void* a, const void* b) noexcept nogil:
    cdef int64_t x = (<int64_t*>a)[0], y = (<int64_t*>b)[0]
    return (x > y) - (x < y)


def pivot_dense(double[:, ::1] T, double[::1] rhs, double[::1] d, Py_ssize_t r, Py_ssize_t e):
    cdef Py_ssize_t m = T.shape[0], n = T.shape[1], i, j
    cdef double piv = T[r, e], f
    with nogil:
        for j in range(n):
            T[r, j] /= piv
        rhs[r] /= piv
        for i in range(m):
            if i == r:
                continue
            f = T[i, e]
            if f == 0.0:
                continue
            for j in range(n):
                T[i, j] -= f * T[r, j]
            rhs[i] -= f * rhs[r]
        f = d[e]
        if f != 0.0:
            for j in range(n):
                d[j] -= f * T[r, j]


def refine_round(cnp.int64_t[::1] colors, cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
                 cnp.int64_t[::1] ecolors):
    """One refinement round; signatures are exact byte strings of sorted packed pairs."""
    cdef Py_ssize_t n = colors.shape[0], v, k, a, b, deg, maxdeg = 0
    out = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] o = out
    cdef dict table = {}
    for v in range(n):
        if indptr[v + 1] - indptr[v] > maxdeg:
            maxdeg = indptr[v + 1] - indptr[v]
    cdef int64_t* buf = <int64_t*>malloc((maxdeg + 1) * sizeof(int64_t))
    if buf == NULL:
        raise MemoryError()
    try:
        for v in range(n):
            a = indptr[v]
            b = indptr[v + 1]
            deg = b - a
            buf[0] = colors[v]
            for k in range(deg):
                # colors and edge colors are below 2**31, so packing is lossless
                buf[k + 1] = (colors[indices[a + k]] << 32) | ecolors[a + k]
            qsort(&buf[1], deg, sizeof(int64_t), _cmp)
            sig = PyBytes_FromStringAndSize(<char*>buf, (deg + 1) * sizeof(int64_t))
            c = table.get(sig)
            if c is None:
                c = len(table)
                table[sig] = c
            o[v] = c
    finally:
        free(buf)
    return out, len(table)
