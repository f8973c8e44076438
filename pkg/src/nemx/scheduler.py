"""Optimal prosumer consumption under a NEM X tariff.

The optimum has a two-threshold structure.  With ``d_plus`` the total demand
at the retail rate and ``d_minus`` the total demand at the sell rate:

* ``r < d_plus``: net consumer, every device consumes at the retail rate;
* ``r > d_minus``: net producer, every device consumes at the sell rate;
* otherwise: net-zero, consumption is priced at the shadow price ``mu`` in
  ``[sell, retail]`` that makes total demand equal ``r``.

``brute_force_schedule`` solves the same problem by exhaustive search over a
consumption grid and is kept as an independent check.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from nemx import kernels
from nemx.devices import DeviceSet, DeviceUtility, inverse_marginal_clamped
from nemx.errors import InvalidParameterError, SolverError
from nemx.tariff import TariffParams, payment

MU_TOL = 1e-9
BALANCE_TOL = 1e-7
MAX_ITER = 200
BRUTE_FORCE_MAX_DEVICES = 3


class Zone(enum.Enum):
    NET_CONSUMPTION = "NetConsumption"
    NET_ZERO = "NetZero"
    NET_PRODUCTION = "NetProduction"


_ZONE_BY_CODE = {
    kernels.ZONE_CONSUMPTION: Zone.NET_CONSUMPTION,
    kernels.ZONE_NET_ZERO: Zone.NET_ZERO,
    kernels.ZONE_PRODUCTION: Zone.NET_PRODUCTION,
}


class Priority(enum.Enum):
    ALWAYS_ON = "AlwaysOn"
    CONDITIONAL_ON = "ConditionalOn"
    NEVER_ON = "NeverOn"


@dataclass(frozen=True)
class Thresholds:
    d_plus: float
    d_minus: float


@dataclass(frozen=True)
class Schedule:
    consumption: tuple[float, ...]
    zone: Zone
    mu_star: float | None
    net: float
    surplus: float
    payment: float
    r: float

    @property
    def total(self) -> float:
        return math.fsum(self.consumption)

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "consumption": list(self.consumption),
            "total": self.total,
            "zone": self.zone.value,
            "mu_star": self.mu_star,
            "net": self.net,
            "surplus": self.surplus,
            "payment": self.payment,
        }


@dataclass(frozen=True)
class DemandPoint:
    r: float
    total: float
    zone: Zone


def _as_device_set(devices) -> DeviceSet:
    return devices if isinstance(devices, DeviceSet) else DeviceSet(devices)


def _check_r(r: float) -> None:
    if not math.isfinite(r) or r < 0:
        raise InvalidParameterError(f"renewable output must be finite and >= 0, got {r}")


def thresholds(devices: Sequence[DeviceUtility], params: TariffParams) -> Thresholds:
    d_plus = math.fsum(inverse_marginal_clamped(d, params.retail_rate) for d in devices)
    d_minus = math.fsum(inverse_marginal_clamped(d, params.sell_rate) for d in devices)
    return Thresholds(d_plus, d_minus)


def _finish(devices: DeviceSet, params: TariffParams, r: float,
            consumption: tuple[float, ...], zone: Zone, mu: float | None) -> Schedule:
    net = math.fsum(consumption) - r
    pay = payment(params, net)
    return Schedule(
        consumption=consumption,
        zone=zone,
        mu_star=mu,
        net=net,
        surplus=devices.total_utility(consumption) - pay,
        payment=pay,
        r=r,
    )


def net_zero_price(
    devices: Sequence[DeviceUtility],
    params: TariffParams,
    r: float,
    mu_tol: float = MU_TOL,
    balance_tol: float = BALANCE_TOL,
    max_iter: int = MAX_ITER,
) -> float:
    """Shadow price in ``[sell, retail]`` at which clamped demand equals ``r``.

    Only meaningful for ``d_plus <= r <= d_minus``.  When demand is flat at
    the root any price in the flat set is returned.
    """
    a, b, d_max = _as_device_set(devices).arrays()
    mu, iters = kernels.net_zero_price(
        a, b, d_max, float(r), params.sell_rate, params.retail_rate,
        mu_tol, balance_tol, max_iter,
    )
    if iters < 0:
        raise SolverError(f"net-zero price bisection did not converge in {max_iter} iterations")
    return mu


def optimal_schedule(
    devices: Sequence[DeviceUtility],
    params: TariffParams,
    r: float,
    mu_tol: float = MU_TOL,
    balance_tol: float = BALANCE_TOL,
    max_iter: int = MAX_ITER,
) -> Schedule:
    devices = _as_device_set(devices)
    _check_r(r)
    th = thresholds(devices, params)
    if r < th.d_plus:
        price, zone, mu = params.retail_rate, Zone.NET_CONSUMPTION, None
    elif r > th.d_minus:
        price, zone, mu = params.sell_rate, Zone.NET_PRODUCTION, None
    else:
        mu = net_zero_price(devices, params, r, mu_tol, balance_tol, max_iter)
        price, zone = mu, Zone.NET_ZERO
    consumption = tuple(inverse_marginal_clamped(d, price) for d in devices)
    return _finish(devices, params, r, consumption, zone, mu)


def classify_device(dev: DeviceUtility, params: TariffParams) -> Priority:
    """Which zones a device is used in, from its marginal utility at zero.

    A device with ``d_max == 0`` can never consume and is reported NeverOn.
    """
    if dev.d_max == 0 or dev.a < params.sell_rate:
        return Priority.NEVER_ON
    if dev.a > params.retail_rate:
        return Priority.ALWAYS_ON
    return Priority.CONDITIONAL_ON


def demand_curve(
    devices: Sequence[DeviceUtility], params: TariffParams, r_grid: Sequence[float]
) -> list[DemandPoint]:
    r_grid = list(r_grid)
    if any(r1 > r2 for r1, r2 in zip(r_grid, r_grid[1:])):
        raise InvalidParameterError("r_grid must be sorted ascending")
    points = []
    for r in r_grid:
        s = optimal_schedule(devices, params, r)
        points.append(DemandPoint(r, s.total, s.zone))
    return points


@dataclass(frozen=True)
class BatchSchedule:
    """Vectorized schedules: totals, utilities, shadow prices and zone codes."""

    total: np.ndarray
    utility: np.ndarray
    mu: np.ndarray
    zone: np.ndarray

    def zones(self) -> list[Zone]:
        return [_ZONE_BY_CODE[int(c)] for c in self.zone]


def schedule_batch(
    devices: Sequence[DeviceUtility],
    retail: np.ndarray,
    sell: np.ndarray,
    r: np.ndarray,
    mu_tol: float = MU_TOL,
    balance_tol: float = BALANCE_TOL,
    max_iter: int = MAX_ITER,
) -> BatchSchedule:
    """Optimal total consumption and utility for arrays of prices and outputs.

    Prices are assumed validated (``0 <= sell <= retail``).
    """
    a, b, d_max = _as_device_set(devices).arrays()
    retail = np.ascontiguousarray(retail, dtype=np.float64)
    sell = np.ascontiguousarray(sell, dtype=np.float64)
    r = np.ascontiguousarray(r, dtype=np.float64)
    if not (retail.shape == sell.shape == r.shape):
        raise InvalidParameterError("retail, sell and r must have the same shape")
    if np.any(r < 0) or not np.all(np.isfinite(r)):
        raise InvalidParameterError("renewable output must be finite and >= 0")
    total, util, mu, zone = kernels.schedule_batch(
        a, b, d_max, retail, sell, r, mu_tol, balance_tol, max_iter
    )
    if np.any(zone < 0):
        raise SolverError(f"net-zero price bisection did not converge in {max_iter} iterations")
    return BatchSchedule(total, util, mu, zone)


def _grid_utilities(dev: DeviceUtility, step: float) -> np.ndarray:
    n = int(math.floor(dev.d_max / step + 1e-9))
    d = np.minimum(np.arange(n + 1) * step, dev.d_max)
    return dev.a * d - 0.5 * dev.b * d * d


def brute_force_schedule(
    devices: Sequence[DeviceUtility], params: TariffParams, r: float, step: float
) -> Schedule:
    """Best schedule on the grid ``{0, step, 2*step, ...}`` per device.

    Each device's grid stops at the last point not exceeding ``d_max``.  The
    search is exhaustive: for every grid total the best split across devices
    is found by max-plus convolution of the per-device utility tables, then
    the payment is charged on the total.  Limited to three devices.

    The zone label is read from the sign of the net consumption with a
    half-step dead band; ``mu_star`` is not estimated.
    """
    devices = _as_device_set(devices)
    _check_r(r)
    if len(devices) > BRUTE_FORCE_MAX_DEVICES:
        raise InvalidParameterError(
            f"brute force limited to {BRUTE_FORCE_MAX_DEVICES} devices, got {len(devices)}"
        )
    if not step > 0:
        raise InvalidParameterError(f"grid step must be > 0, got {step}")

    best_split = []
    table = _grid_utilities(devices[0], step)
    for dev in devices[1:]:
        table, arg = kernels.maxplus_convolve(table, _grid_utilities(dev, step))
        best_split.append(arg)

    z = np.arange(len(table)) * step - r
    pay = np.where(z >= 0, params.retail_rate * z, params.sell_rate * z) + params.fixed_charge
    k = int(np.argmax(table - pay))

    idx = []
    for arg in reversed(best_split):
        j = int(arg[k])
        idx.append(j)
        k -= j
    idx.append(k)
    consumption = tuple(
        min(i * step, dev.d_max) for i, dev in zip(reversed(idx), devices)
    )

    net = math.fsum(consumption) - r
    if net > step / 2:
        zone = Zone.NET_CONSUMPTION
    elif net < -step / 2:
        zone = Zone.NET_PRODUCTION
    else:
        zone = Zone.NET_ZERO
    return _finish(devices, params, r, consumption, zone, None)


def grid_error_bound(devices: Sequence[DeviceUtility], params: TariffParams, step: float) -> float:
    """Upper bound on ``surplus(optimal) - surplus(brute force)``.

    Surplus is Lipschitz in each ``d_i`` with constant at most
    ``a_i + retail_rate`` and rounding every coordinate down to the grid moves
    it by less than ``step``.
    """
    return step * math.fsum(dev.a + params.retail_rate for dev in devices)
