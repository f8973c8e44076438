"""Pure Python implementations of the numerical kernels.

Same signatures and tie-breaking as ``_ckernels.pyx``; used when the compiled
module is unavailable or ``NEMX_PURE_PYTHON`` is set.
"""

from __future__ import annotations

import numpy as np

ZONE_CONSUMPTION = 0
ZONE_NET_ZERO = 1
ZONE_PRODUCTION = 2


def clamped_demand(a, b, d_max, price):
    total = 0.0
    for i in range(len(a)):
        d = (a[i] - price) / b[i]
        if d > d_max[i]:
            d = d_max[i]
        if d < 0.0:
            d = 0.0
        total += d
    return total


def _clamped_utility(a, b, d_max, price):
    total = 0.0
    util = 0.0
    for i in range(len(a)):
        d = (a[i] - price) / b[i]
        if d > d_max[i]:
            d = d_max[i]
        if d < 0.0:
            d = 0.0
        total += d
        util += a[i] * d - 0.5 * b[i] * d * d
    return total, util


def _polish(a, b, d_max, r, mu, f, lo, hi):
    # Demand is linear in price between kinks: solve exactly on the active
    # set found at mu and keep the result only if it balances better.
    inv_b = 0.0
    num = -r
    for i in range(len(a)):
        d = (a[i] - mu) / b[i]
        if d >= d_max[i]:
            num += d_max[i]
        elif d > 0.0:
            inv_b += 1.0 / b[i]
            num += a[i] / b[i]
    if inv_b == 0.0:
        return mu
    cand = num / inv_b
    if not lo <= cand <= hi:
        return mu
    if abs(clamped_demand(a, b, d_max, cand) - r) <= abs(f):
        return cand
    return mu


def net_zero_price(a, b, d_max, r, lo, hi, mu_tol, balance_tol, max_iter):
    """Bisection for the price at which clamped demand equals ``r``.

    Demand is non-increasing in price, so ``lo`` must give demand >= r and
    ``hi`` demand <= r.  The bisection result is refined by one exact solve
    on its active set.  Returns ``(mu, iterations)``; iterations is -1 when
    ``max_iter`` was exhausted.
    """
    lo0, hi0 = lo, hi
    mid = lo
    for it in range(max_iter):
        mid = 0.5 * (lo + hi)
        f = clamped_demand(a, b, d_max, mid) - r
        if f == 0.0:
            return mid, it + 1
        if hi - lo <= mu_tol and abs(f) <= balance_tol:
            return _polish(a, b, d_max, r, mid, f, lo0, hi0), it + 1
        if f > 0.0:
            lo = mid
        else:
            hi = mid
    return mid, -1


def schedule_batch(a, b, d_max, retail, sell, r, mu_tol, balance_tol, max_iter):
    """Threshold schedule for many (retail, sell, r) triples at once.

    Returns arrays of total consumption, total utility, net-zero price (NaN
    outside the net-zero zone) and zone code.
    """
    n = len(r)
    totals = np.empty(n)
    utils = np.empty(n)
    mus = np.full(n, np.nan)
    zones = np.empty(n, dtype=np.int8)
    for k in range(n):
        d_plus, u_plus = _clamped_utility(a, b, d_max, retail[k])
        d_minus, u_minus = _clamped_utility(a, b, d_max, sell[k])
        if r[k] < d_plus:
            totals[k], utils[k], zones[k] = d_plus, u_plus, ZONE_CONSUMPTION
        elif r[k] > d_minus:
            totals[k], utils[k], zones[k] = d_minus, u_minus, ZONE_PRODUCTION
        else:
            mu, iters = net_zero_price(
                a, b, d_max, r[k], sell[k], retail[k], mu_tol, balance_tol, max_iter
            )
            if iters < 0:
                zones[k] = -1
                continue
            totals[k], utils[k] = _clamped_utility(a, b, d_max, mu)
            mus[k] = mu
            zones[k] = ZONE_NET_ZERO
    return totals, utils, mus, zones


def maxplus_convolve(f, g):
    """``h[k] = max_j f[k-j] + g[j]`` with the smallest maximizing ``j``."""
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    nf, ng = len(f), len(g)
    h = np.full(nf + ng - 1, -np.inf)
    arg = np.zeros(nf + ng - 1, dtype=np.int64)
    for j in range(ng):
        cand = f + g[j]
        window = h[j : j + nf]
        better = cand > window
        window[better] = cand[better]
        arg[j : j + nf][better] = j
    return h, arg
