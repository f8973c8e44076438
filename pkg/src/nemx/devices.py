"""Quadratic device utilities.

Each device ``i`` has utility ``U(d) = a*d - (b/2)*d**2`` on ``[0, d_max]``,
so its marginal utility ``V(d) = a - b*d`` is linear and strictly decreasing
and the inverse marginal has a closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from nemx.errors import InvalidParameterError

# Slack for the domain checks on d; schedules built from clamped inverses can
# land a few ulps outside [0, d_max].
_DOMAIN_EPS = 1e-12


@dataclass(frozen=True)
class DeviceUtility:
    a: float
    b: float
    d_max: float
    name: str = ""

    def __post_init__(self) -> None:
        label = self.name or "device"
        for field in ("a", "b", "d_max"):
            if not math.isfinite(getattr(self, field)):
                raise InvalidParameterError(f"{label}: {field} must be finite")
        if self.b <= 0:
            raise InvalidParameterError(f"{label}: slope b must be > 0, got {self.b}")
        if self.d_max < 0:
            raise InvalidParameterError(f"{label}: d_max must be >= 0, got {self.d_max}")

    @property
    def satiation(self) -> float:
        """Consumption at which marginal utility reaches zero."""
        return self.a / self.b

    def check_monotone(self) -> None:
        """Require utility to be non-decreasing on all of ``[0, d_max]``.

        Not enforced at construction: at non-negative prices the optimum never
        exceeds ``satiation``, so a larger ``d_max`` is harmless to the
        scheduler.  Config loading calls this.
        """
        if self.a - self.b * self.d_max < 0:
            raise InvalidParameterError(
                f"{self.name or 'device'}: utility not increasing on [0, d_max] "
                f"(a - b*d_max = {self.a - self.b * self.d_max:.6g} < 0)"
            )

    def _check(self, d: float) -> None:
        if not (-_DOMAIN_EPS <= d <= self.d_max + _DOMAIN_EPS):
            raise InvalidParameterError(
                f"consumption {d} outside [0, {self.d_max}] for {self.name or 'device'}"
            )


def utility(dev: DeviceUtility, d: float) -> float:
    dev._check(d)
    return dev.a * d - 0.5 * dev.b * d * d


def marginal(dev: DeviceUtility, d: float) -> float:
    dev._check(d)
    return dev.a - dev.b * d


def inverse_marginal_clamped(dev: DeviceUtility, price: float) -> float:
    """Consumption maximizing ``U(d) - price*d`` over ``[0, d_max]``."""
    if not math.isfinite(price):
        raise InvalidParameterError(f"price must be finite, got {price}")
    return max(0.0, min((dev.a - price) / dev.b, dev.d_max))


class DeviceSet(tuple):
    """Non-empty ordered collection of devices."""

    def __new__(cls, devices: Iterable[DeviceUtility]) -> DeviceSet:
        devices = tuple(devices)
        if not devices:
            raise InvalidParameterError("a device set needs at least one device")
        for dev in devices:
            if not isinstance(dev, DeviceUtility):
                raise InvalidParameterError(f"not a DeviceUtility: {dev!r}")
        return super().__new__(cls, devices)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Parameters as float64 arrays ``(a, b, d_max)`` for the kernels."""
        a = np.array([d.a for d in self], dtype=np.float64)
        b = np.array([d.b for d in self], dtype=np.float64)
        d_max = np.array([d.d_max for d in self], dtype=np.float64)
        return a, b, d_max

    def total_utility(self, consumption: Sequence[float]) -> float:
        return math.fsum(utility(dev, d) for dev, d in zip(self, consumption))
