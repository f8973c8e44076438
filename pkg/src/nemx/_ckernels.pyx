# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled numerical kernels; mirrors ``nemx._pykernels`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, INFINITY, NAN

cnp.import_array()

ZONE_CONSUMPTION = 0
ZONE_NET_ZERO = 1
ZONE_PRODUCTION = 2


cdef inline double _demand(const double[:] a, const double[:] b, const double[:] d_max,
                           double price) noexcept nogil:
    cdef Py_ssize_t i
    cdef double d, total = 0.0
    for i in range(a.shape[0]):
        d = (a[i] - price) / b[i]
        if d > d_max[i]:
            d = d_max[i]
        if d < 0.0:
            d = 0.0
        total += d
    return total


cdef inline void _demand_utility(const double[:] a, const double[:] b, const double[:] d_max,
                                 double price, double* total, double* util) noexcept nogil:
    cdef Py_ssize_t i
    cdef double d
    total[0] = 0.0
    util[0] = 0.0
    for i in range(a.shape[0]):
        d = (a[i] - price) / b[i]
        if d > d_max[i]:
            d = d_max[i]
        if d < 0.0:
            d = 0.0
        total[0] += d
        util[0] += a[i] * d - 0.5 * b[i] * d * d


cdef double _polish(const double[:] a, const double[:] b, const double[:] d_max, double r,
                    double mu, double f, double lo, double hi) noexcept nogil:
    cdef Py_ssize_t i
    cdef double d, cand, inv_b = 0.0, num = -r
    for i in range(a.shape[0]):
        d = (a[i] - mu) / b[i]
        if d >= d_max[i]:
            num += d_max[i]
        elif d > 0.0:
            inv_b += 1.0 / b[i]
            num += a[i] / b[i]
    if inv_b == 0.0:
        return mu
    cand = num / inv_b
    if not (lo <= cand <= hi):
        return mu
    if fabs(_demand(a, b, d_max, cand) - r) <= fabs(f):
        return cand
    return mu


cdef double _bisect(const double[:] a, const double[:] b, const double[:] d_max, double r,
                    double lo, double hi, double mu_tol, double balance_tol,
                    int max_iter, int* iters) noexcept nogil:
    cdef int it
    cdef double lo0 = lo, hi0 = hi
    cdef double mid = lo, f
    for it in range(max_iter):
        mid = 0.5 * (lo + hi)
        f = _demand(a, b, d_max, mid) - r
        if f == 0.0:
            iters[0] = it + 1
            return mid
        if hi - lo <= mu_tol and fabs(f) <= balance_tol:
            iters[0] = it + 1
            return _polish(a, b, d_max, r, mid, f, lo0, hi0)
        if f > 0.0:
            lo = mid
        else:
            hi = mid
    iters[0] = -1
    return mid


def clamped_demand(const double[:] a, const double[:] b, const double[:] d_max, double price):
    return _demand(a, b, d_max, price)


def net_zero_price(const double[:] a, const double[:] b, const double[:] d_max, double r,
                   double lo, double hi, double mu_tol, double balance_tol, int max_iter):
    cdef int iters = 0
    cdef double mu = _bisect(a, b, d_max, r, lo, hi, mu_tol, balance_tol, max_iter, &iters)
    return mu, iters


def schedule_batch(const double[:] a, const double[:] b, const double[:] d_max,
                   const double[:] retail, const double[:] sell, const double[:] r,
                   double mu_tol, double balance_tol, int max_iter):
    cdef Py_ssize_t n = r.shape[0], k
    cdef cnp.ndarray[cnp.float64_t, ndim=1] totals_arr = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] utils_arr = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] mus_arr = np.full(n, np.nan)
    cdef cnp.ndarray[cnp.int8_t, ndim=1] zones_arr = np.empty(n, dtype=np.int8)
    cdef double[:] totals = totals_arr
    cdef double[:] utils = utils_arr
    cdef double[:] mus = mus_arr
    cdef cnp.int8_t[:] zones = zones_arr
    cdef double d_plus, u_plus, d_minus, u_minus, mu
    cdef int iters
    with nogil:
        for k in range(n):
            _demand_utility(a, b, d_max, retail[k], &d_plus, &u_plus)
            _demand_utility(a, b, d_max, sell[k], &d_minus, &u_minus)
            if r[k] < d_plus:
                totals[k] = d_plus
                utils[k] = u_plus
                zones[k] = 0
            elif r[k] > d_minus:
                totals[k] = d_minus
                utils[k] = u_minus
                zones[k] = 2
            else:
                mu = _bisect(a, b, d_max, r[k], sell[k], retail[k], mu_tol, balance_tol,
                             max_iter, &iters)
                if iters < 0:
                    zones[k] = -1
                    continue
                _demand_utility(a, b, d_max, mu, &totals[k], &utils[k])
                mus[k] = mu
                zones[k] = 1
    return totals_arr, utils_arr, mus_arr, zones_arr


def maxplus_convolve(f_in, g_in):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] f_arr = np.ascontiguousarray(f_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] g_arr = np.ascontiguousarray(g_in, dtype=np.float64)
    cdef double[:] f = f_arr
    cdef double[:] g = g_arr
    cdef Py_ssize_t nf = f.shape[0], ng = g.shape[0], j, i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] h_arr = np.full(nf + ng - 1, -np.inf)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] arg_arr = np.zeros(nf + ng - 1, dtype=np.int64)
    cdef double[:] h = h_arr
    cdef cnp.int64_t[:] arg = arg_arr
    cdef double c, gj
    with nogil:
        for j in range(ng):
            gj = g[j]
            for i in range(nf):
                c = f[i] + gj
                if c > h[i + j]:
                    h[i + j] = c
                    arg[i + j] = j
    return h_arr, arg_arr
