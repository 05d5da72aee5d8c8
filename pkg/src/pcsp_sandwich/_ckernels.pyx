# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for the exhaustive enumerations.

Each function mirrors one in ``_pykernels`` with identical inputs and outputs.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64


def _linear_cyclic_mask(i64[:, ::1] coeffs, long n, long p, long out_mod):
    """1 where ``x -> (sum a_i x_i mod p) mod out_mod`` is cyclic on ``[n]^p``."""
    cdef Py_ssize_t K = coeffs.shape[0], ar = coeffs.shape[1]
    cdef Py_ssize_t size = 1, i, j, k, idx
    for j in range(ar):
        size *= n
    cdef i64[::1] vals = np.empty(size, dtype=np.int64)
    cdef i64[::1] digits = np.zeros(ar, dtype=np.int64)
    cdef i64[::1] rot = np.empty(size, dtype=np.int64)
    cdef cnp.uint8_t[::1] out = np.ones(K, dtype=np.uint8)
    cdef i64 top = size // n if size > 0 else 0
    cdef i64 acc
    for idx in range(size):
        rot[idx] = (idx % top) * n + idx // top
    for k in range(K):
        # walk points in index order, keeping sum a_i x_i incrementally
        for j in range(ar):
            digits[j] = 0
        acc = 0
        for idx in range(size):
            vals[idx] = (acc % p) % out_mod
            j = ar - 1
            while j >= 0:
                digits[j] += 1
                acc += coeffs[k, j]
                if digits[j] < n:
                    break
                acc -= coeffs[k, j] * n
                digits[j] = 0
                j -= 1
        for idx in range(size):
            if vals[idx] != vals[rot[idx]]:
                out[k] = 0
                break
    return np.asarray(out, dtype=bool)


def _tables_cyclic_mask(i64[:, ::1] tables, i64[::1] rot):
    cdef Py_ssize_t K = tables.shape[0], size = tables.shape[1], k, idx
    cdef cnp.uint8_t[::1] out = np.ones(K, dtype=np.uint8)
    for k in range(K):
        for idx in range(size):
            if tables[k, idx] != tables[k, rot[idx]]:
                out[k] = 0
                break
    return np.asarray(out, dtype=bool)


def _selection_orbit_scopes(i64[:, ::1] T, long n, long p, i64[::1] labels, i64 start, i64 stop):
    """Orbit labels of the zipped columns for selections ``start..stop-1``.

    Selection ``s`` picks rows ``(s_0, ..., s_{p-1})`` of ``T`` with ``s``
    written in base ``len(T)``, ``s_0`` most significant.
    """
    cdef Py_ssize_t r = T.shape[0], k = T.shape[1], i, j
    cdef i64 s, q, pt
    cdef i64[::1] rows = np.empty(p, dtype=np.int64)
    cdef i64[:, ::1] out = np.empty((stop - start, k), dtype=np.int64)
    for s in range(start, stop):
        q = s
        for i in range(p - 1, -1, -1):
            rows[i] = q % r
            q //= r
        for j in range(k):
            pt = 0
            for i in range(p):
                pt = pt * n + T[rows[i], j]
            out[s - start, j] = labels[pt]
    return np.asarray(out)


def _c64(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def linear_cyclic_mask(coeffs, n, p, out_mod):
    return _linear_cyclic_mask(_c64(coeffs), n, p, out_mod)


def tables_cyclic_mask(tables, rot):
    return _tables_cyclic_mask(_c64(tables), _c64(rot))


def selection_orbit_scopes(T, n, p, labels, start, stop):
    return _selection_orbit_scopes(_c64(T), n, p, _c64(labels), start, stop)
