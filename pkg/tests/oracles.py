"""Independent reference computations used by the tests.

Nothing here calls the closed-form scheduler or the payback loop; each
helper recomputes its answer from first principles.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from nemx.scheduler import Zone, optimal_schedule, thresholds
from nemx.tariff import TariffParams

EPS = 1e-3
ZERO_TOL = 1e-9


def grid_surplus_single(dev, params, r, step=1e-4):
    """Best surplus of one device by dense grid search over ``[0, d_max]``."""
    d = np.linspace(0.0, dev.d_max, int(round(dev.d_max / step)) + 1)
    z = d - r
    pay = np.where(z >= 0, params.retail_rate * z, params.sell_rate * z) + params.fixed_charge
    s = dev.a * d - 0.5 * dev.b * d * d - pay
    k = int(np.argmax(s))
    return float(s[k]), float(d[k])


def enumerate_surplus(devices, params, r, step):
    """Exhaustive product-grid search; only for tiny grids."""
    grids = [np.arange(0.0, dev.d_max + step / 2, step) for dev in devices]
    best = -math.inf
    for point in itertools.product(*grids):
        d = [min(x, dev.d_max) for x, dev in zip(point, devices)]
        z = sum(d) - r
        pay = (params.retail_rate if z >= 0 else params.sell_rate) * z + params.fixed_charge
        u = sum(dev.a * x - 0.5 * dev.b * x * x for dev, x in zip(devices, d))
        best = max(best, u - pay)
    return best


def payback_cumsum(saving, cost, nu, zeta, horizon=50):
    """Payback year from an explicit list of discounted yearly savings."""
    if saving <= 0:
        return None
    q = (1 - nu) / (1 + zeta)
    flows = np.array([saving * q**k for k in range(horizon + 1)])
    hit = np.nonzero(np.cumsum(flows) >= cost)[0]
    return int(hit[0]) if hit.size else None


# Expected effect of an eps increase of each parameter on (d_i, S, P) at an
# interior point of each zone.  "+"/"-": strict change, "+w"/"-w": weak
# change, "0": no change within ZERO_TOL, "*": sign not determined.
SIGN_TABLE = {
    "r": {
        Zone.NET_CONSUMPTION: ("0", "+", "-"),
        Zone.NET_ZERO: ("+", "+", "0"),
        Zone.NET_PRODUCTION: ("0", "+", "-"),
    },
    "retail": {
        Zone.NET_CONSUMPTION: ("-w", "-", "*"),
        Zone.NET_ZERO: ("0", "0", "0"),
        Zone.NET_PRODUCTION: ("0", "0", "0"),
    },
    "sell": {
        Zone.NET_CONSUMPTION: ("0", "0", "0"),
        Zone.NET_ZERO: ("0", "0", "0"),
        Zone.NET_PRODUCTION: ("-w", "+", "-"),
    },
    "fixed": {
        Zone.NET_CONSUMPTION: ("0", "-", "+"),
        Zone.NET_ZERO: ("0", "-", "+"),
        Zone.NET_PRODUCTION: ("0", "-", "+"),
    },
}


def interior_points(devices, params):
    """One interior renewable level per non-empty zone."""
    th = thresholds(devices, params)
    pts = {}
    if th.d_plus > 0:
        pts[Zone.NET_CONSUMPTION] = 0.5 * th.d_plus
    if th.d_minus > th.d_plus:
        pts[Zone.NET_ZERO] = 0.5 * (th.d_plus + th.d_minus)
    pts[Zone.NET_PRODUCTION] = th.d_minus + 1.0
    return pts


def _perturb(params, r, which, eps):
    p = params
    if which == "r":
        return p, r + eps
    if which == "retail":
        return TariffParams(p.retail_rate + eps, p.sell_rate, p.fixed_charge), r
    if which == "sell":
        return TariffParams(p.retail_rate, p.sell_rate + eps, p.fixed_charge), r
    return TariffParams(p.retail_rate, p.sell_rate, p.fixed_charge + eps), r


def _sign_ok(sym, delta, tol=ZERO_TOL):
    if sym == "*":
        return True
    if sym == "0":
        return abs(delta) <= tol
    if sym == "+":
        return delta > tol
    if sym == "-":
        return delta < -tol
    if sym == "+w":
        return delta >= -tol
    return delta <= tol


def _d_ok(sym, deltas):
    if sym == "0":
        return all(abs(x) <= ZERO_TOL for x in deltas)
    if sym in ("+", "+w"):
        ok = all(x >= -ZERO_TOL for x in deltas)
        return ok and (sym == "+w" or math.fsum(deltas) > ZERO_TOL)
    ok = all(x <= ZERO_TOL for x in deltas)
    return ok and (sym == "-w" or math.fsum(deltas) < -ZERO_TOL)


def probe_statics(devices, params, eps=EPS):
    """Check every comparative-statics cell the instance can probe.

    Returns ``(cells, mismatches)``: the set of ``(param, zone)`` cells
    probed and a list of ``(param, zone, quantity, delta)`` mismatches.
    Cells whose perturbed point leaves its zone are not probed.
    """
    cells = set()
    bad = []
    for zone, r in interior_points(devices, params).items():
        base = optimal_schedule(devices, params, r)
        if base.zone is not zone:
            continue
        for which, row in SIGN_TABLE.items():
            if which == "sell" and params.sell_rate + eps > params.retail_rate:
                continue
            p2, r2 = _perturb(params, r, which, eps)
            new = optimal_schedule(devices, p2, r2)
            if new.zone is not zone:
                continue
            d_sym, s_sym, p_sym = row[zone]
            dd = [x - y for x, y in zip(new.consumption, base.consumption)]
            ds = new.surplus - base.surplus
            dp = new.payment - base.payment
            cells.add((which, zone))
            if not _d_ok(d_sym, dd):
                bad.append((which, zone.value, "d", dd))
            if not _sign_ok(s_sym, ds):
                bad.append((which, zone.value, "S", ds))
            if not _sign_ok(p_sym, dp):
                bad.append((which, zone.value, "P", dp))
            if which == "fixed":
                if abs(ds + eps) > ZERO_TOL or abs(dp - eps) > ZERO_TOL:
                    bad.append((which, zone.value, "shift", (ds, dp)))
    return cells, bad
