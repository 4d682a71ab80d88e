# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tableau kernels. Mirrors ``_pykernel`` exactly."""

from libc.math cimport fabs
from libc.stdlib cimport malloc, free

cdef double FLUSH = 1e-13


def pivot(double[:, ::1] T, Py_ssize_t r, Py_ssize_t c):
    cdef Py_ssize_t nrows = T.shape[0], ncols = T.shape[1]
    cdef Py_ssize_t i, j, k, nnz = 0
    cdef double piv = T[r, c], f, v
    cdef Py_ssize_t *idx = <Py_ssize_t *> malloc(ncols * sizeof(Py_ssize_t))
    if idx == NULL:
        raise MemoryError()
    try:
        for j in range(ncols):
            v = T[r, j] / piv
            if fabs(v) < FLUSH:
                v = 0.0
            T[r, j] = v
            if v != 0.0:
                idx[nnz] = j
                nnz += 1
        T[r, c] = 1.0
        for i in range(nrows):
            if i == r:
                continue
            f = T[i, c]
            if f == 0.0:
                continue
            for k in range(nnz):
                j = idx[k]
                v = T[i, j] - f * T[r, j]
                if fabs(v) < FLUSH:
                    v = 0.0
                T[i, j] = v
            T[i, c] = 0.0
    finally:
        free(idx)


def price_dantzig(double[:, ::1] T, Py_ssize_t obj_row, Py_ssize_t ncols, double tol):
    cdef Py_ssize_t j, best = -1
    cdef double dmin = -tol
    for j in range(ncols):
        if T[obj_row, j] < dmin:
            dmin = T[obj_row, j]
            best = j
    return best


def price_bland(double[:, ::1] T, Py_ssize_t obj_row, Py_ssize_t ncols, double tol):
    cdef Py_ssize_t j
    for j in range(ncols):
        if T[obj_row, j] < -tol:
            return j
    return -1


def ratio_test(double[:, ::1] T, Py_ssize_t c, Py_ssize_t m, const long[::1] basis, double pivtol):
    cdef Py_ssize_t i, best = -1, last = T.shape[1] - 1
    cdef double a, ratio, bestratio = 0.0
    # first pass: minimum ratio
    for i in range(m):
        a = T[i, c]
        if a > pivtol:
            ratio = T[i, last] / a
            if best < 0 or ratio < bestratio:
                bestratio = ratio
                best = i
    if best < 0:
        return -1
    # second pass: lowest basic index among ties
    cdef double cutoff = bestratio + 1e-12 * (1.0 + fabs(bestratio))
    for i in range(m):
        a = T[i, c]
        if a > pivtol:
            ratio = T[i, last] / a
            if ratio <= cutoff and basis[i] < basis[best]:
                best = i
    return best
