# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()


def assemble_closed_form(cnp.int64_t[:, ::1] basis, double[::1] lognorm,
                         cnp.int64_t[:, ::1] term_a, cnp.int64_t[:, ::1] term_b,
                         cnp.int64_t[::1] term_p, double complex[::1] term_c,
                         double[::1] logfact, double[::1] logpoch, double[::1] shiftpoch):
    cdef Py_ssize_t N = basis.shape[0]
    cdef Py_ssize_t n = basis.shape[1]
    cdef Py_ssize_t T = term_a.shape[0]
    cdef Py_ssize_t i, j, t, k
    cdef cnp.int64_t alpha, deg
    cdef double logval
    cdef bint ok
    out = np.zeros((N, N), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    for t in range(T):
        for i in range(N):
            for j in range(N):
                ok = True
                for k in range(n):
                    if basis[j, k] + term_a[t, k] != basis[i, k] + term_b[t, k]:
                        ok = False
                        break
                if not ok:
                    continue
                logval = 0.0
                deg = 0
                for k in range(n):
                    alpha = basis[j, k] + term_a[t, k]
                    logval += logfact[alpha]
                    deg += alpha
                logval = logval - logpoch[term_p[t] + deg] - lognorm[i] - lognorm[j]
                o[i, j] += term_c[t] * (shiftpoch[term_p[t]] * exp(logval))
    return out


def poly_eval(double complex[:, ::1] points, cnp.int64_t[:, ::1] basis, double complex[::1] coeffs):
    cdef Py_ssize_t P = points.shape[0]
    cdef Py_ssize_t n = points.shape[1]
    cdef Py_ssize_t N = basis.shape[0]
    cdef Py_ssize_t p, k, e, r
    cdef cnp.int64_t maxdeg = 0
    cdef double complex acc, mono
    for r in range(N):
        for k in range(n):
            if basis[r, k] > maxdeg:
                maxdeg = basis[r, k]
    out = np.zeros(P, dtype=np.complex128)
    cdef double complex[::1] o = out
    powers_arr = np.ones((n, maxdeg + 1), dtype=np.complex128)
    cdef double complex[:, ::1] pw = powers_arr
    for p in range(P):
        for k in range(n):
            for e in range(1, maxdeg + 1):
                pw[k, e] = pw[k, e - 1] * points[p, k]
        acc = 0.0
        for r in range(N):
            mono = 1.0
            for k in range(n):
                mono = mono * pw[k, basis[r, k]]
            acc = acc + mono * coeffs[r]
        o[p] = acc
    return out
