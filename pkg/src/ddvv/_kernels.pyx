# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled commutator kernels; same contract as ``ddvv._kernels_py``."""
import numpy as np


cdef inline void _commute(const double[:, :, ::1] s, Py_ssize_t a, Py_ssize_t b,
                          double[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t n = s.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double acc
    for i in range(n):
        for j in range(n):
            acc = 0.0
            for k in range(n):
                acc = acc + s[a, i, k] * s[b, k, j] - s[b, i, k] * s[a, k, j]
            out[i, j] = acc


def commutator_norms(stack):
    cdef const double[:, :, ::1] s = np.ascontiguousarray(stack, dtype=np.float64)
    cdef Py_ssize_t K = s.shape[0]
    cdef Py_ssize_t n = s.shape[1]
    result = np.zeros((K, K), dtype=np.float64)
    cdef double[:, ::1] res = result
    cdef double[:, ::1] c = np.empty((n, n), dtype=np.float64)
    cdef Py_ssize_t a, b, i, j
    cdef double acc
    with nogil:
        for a in range(K):
            for b in range(a + 1, K):
                _commute(s, a, b, c)
                acc = 0.0
                for i in range(n):
                    for j in range(n):
                        acc = acc + c[i, j] * c[i, j]
                res[a, b] = acc
                res[b, a] = acc
    return result


def commutator_grad(stack, weights):
    cdef const double[:, :, ::1] s = np.ascontiguousarray(stack, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t K = s.shape[0]
    cdef Py_ssize_t n = s.shape[1]
    result = np.zeros((K, n, n), dtype=np.float64)
    cdef double[:, :, ::1] g = result
    cdef double[:, ::1] c = np.empty((n, n), dtype=np.float64)
    cdef Py_ssize_t a, b, i, j, k
    cdef double acc, wb
    with nogil:
        for a in range(K):
            for b in range(K):
                wb = w[b]
                if b == a or wb == 0.0:
                    continue
                _commute(s, a, b, c)
                for i in range(n):
                    for j in range(n):
                        acc = 0.0
                        for k in range(n):
                            acc = acc + c[i, k] * s[b, k, j] - s[b, i, k] * c[k, j]
                        g[a, i, j] += wb * acc
    return result
