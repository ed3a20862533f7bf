# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled numerical hot loops.

Mirrors ``tailcovar._kernels._fallback`` function for function; see that
module for the full docstrings.  The normal CDF is evaluated through the
complementary error function, which is exact to double precision.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport erfc, exp, log, M_SQRT1_2

cnp.import_array()


cdef inline double _phi(double z) noexcept nogil:
    return 0.5 * erfc(-z * M_SQRT1_2)


def rect_indicator_integrals(object u_in, object v_in, object rects_in):
    cdef double[::1] u = np.ascontiguousarray(u_in, dtype=np.float64)
    cdef double[::1] v = np.ascontiguousarray(v_in, dtype=np.float64)
    cdef double[:, ::1] rects = np.ascontiguousarray(rects_in, dtype=np.float64)
    cdef Py_ssize_t n = u.shape[0], s = rects.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(s, dtype=np.float64)
    cdef double[::1] acc = out
    cdef Py_ssize_t i, j
    cdef double x0, x1, y0, y1, wx, wy, total
    with nogil:
        for j in range(s):
            x0 = rects[j, 0]
            x1 = rects[j, 1]
            y0 = rects[j, 2]
            y1 = rects[j, 3]
            total = 0.0
            for i in range(n):
                wx = x1 - (u[i] if u[i] > x0 else x0)
                if wx <= 0.0:
                    continue
                wy = y1 - (v[i] if v[i] > y0 else y0)
                if wy > 0.0:
                    total += wx * wy
            acc[j] = total
    return out


def joint_tail_counts(object u_in, object v_in, object x_in, object y_in):
    cdef double[::1] u = np.ascontiguousarray(u_in, dtype=np.float64)
    cdef double[::1] v = np.ascontiguousarray(v_in, dtype=np.float64)
    cdef double[::1] x = np.ascontiguousarray(x_in, dtype=np.float64)
    cdef double[::1] y = np.ascontiguousarray(y_in, dtype=np.float64)
    cdef Py_ssize_t n = u.shape[0], q = x.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.zeros(q, dtype=np.int64)
    cdef long long[::1] acc = out
    cdef Py_ssize_t i, k
    cdef long long c
    with nogil:
        for k in range(q):
            c = 0
            for i in range(n):
                if u[i] <= x[k] and v[i] <= y[k]:
                    c += 1
            acc[k] = c
    return out


cdef inline double _cond_cdf(double x, double log_x, double t, double lam) noexcept nogil:
    cdef double d = (log_x - t) / (2.0 * lam)
    cdef double a = lam + d
    cdef double ell = x * _phi(a) + exp(t) * _phi(lam - d)
    return exp(x - ell) * _phi(a)


def hr_conditional_invert(object u_in, object w_in, double lam, int iters=80):
    cdef double[::1] u = np.ascontiguousarray(u_in, dtype=np.float64)
    cdef double[::1] w = np.ascontiguousarray(w_in, dtype=np.float64)
    cdef Py_ssize_t n = u.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double[::1] res = out
    cdef Py_ssize_t i
    cdef int it
    cdef double x, log_x, lo, hi, mid
    with nogil:
        for i in range(n):
            x = -log(u[i])
            log_x = log(x)
            lo = -700.0
            hi = 700.0
            for it in range(iters):
                mid = 0.5 * (lo + hi)
                if _cond_cdf(x, log_x, mid, lam) > w[i]:
                    lo = mid
                else:
                    hi = mid
            res[i] = exp(-exp(0.5 * (lo + hi)))
    return out
