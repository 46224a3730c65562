# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled exact squared Euclidean distance transform.

Same lower-envelope algorithm as the pure-Python fallback in
_edt_py.py; the two must stay cell-for-cell identical.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef double _INF = 1e300


cdef void _dt1d(double[:] f, double[:] d, Py_ssize_t[:] v, double[:] z,
                Py_ssize_t n) nogil:
    cdef Py_ssize_t k = 0, q, p
    cdef double s
    z[0] = -_INF
    z[1] = _INF
    v[0] = 0
    for q in range(1, n):
        while True:
            p = v[k]
            s = ((f[q] + q * q) - (f[p] + p * p)) / (2.0 * q - 2.0 * p)
            if s <= z[k]:
                k -= 1
            else:
                break
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = _INF
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        p = v[k]
        d[q] = (q - p) * (q - p) + f[p]


def squared_edt(targets):
    """Squared distance (in cell units) to the nearest True cell."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] f = np.where(
        np.asarray(targets, dtype=bool), 0.0, _INF)
    cdef Py_ssize_t nrows = f.shape[0], ncols = f.shape[1]
    cdef Py_ssize_t n = max(nrows, ncols)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] line = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] d = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] v = np.zeros(n, dtype=np.intp)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] z = np.empty(n + 1, dtype=np.float64)
    cdef Py_ssize_t i, j
    for j in range(ncols):
        for i in range(nrows):
            line[i] = f[i, j]
        _dt1d(line, d, v, z, nrows)
        for i in range(nrows):
            f[i, j] = d[i]
    for i in range(nrows):
        for j in range(ncols):
            line[j] = f[i, j]
        _dt1d(line, d, v, z, ncols)
        for j in range(ncols):
            f[i, j] = d[j]
    return f
