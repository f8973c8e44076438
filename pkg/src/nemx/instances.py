"""Random prosumer problem instances for property checks."""

from __future__ import annotations

import math

import numpy as np

from nemx.devices import DeviceSet, DeviceUtility
from nemx.tariff import TariffParams


def random_device(rng: np.random.Generator, grid: float = 1e-3) -> DeviceUtility:
    """Device with a in [0.1, 2], b in [0.05, 1], d_max in [0.5, 5], a >= b*d_max.

    ``d_max`` is rounded down to a multiple of ``grid`` so grid searches can
    reach it exactly.
    """
    while True:
        a = rng.uniform(0.1, 2.0)
        b = rng.uniform(0.05, 1.0)
        top = min(5.0, a / b)
        if top >= 0.5:
            break
    d_max = math.floor(rng.uniform(0.5, top) / grid) * grid
    return DeviceUtility(a, b, max(d_max, 0.5))


def random_tariff(rng: np.random.Generator) -> TariffParams:
    retail = rng.uniform(0.05, 1.0)
    return TariffParams(retail, rng.uniform(0.0, retail), rng.uniform(-1.0, 1.0))


def random_instance(
    rng: np.random.Generator, max_devices: int = 3
) -> tuple[DeviceSet, TariffParams, float]:
    m = int(rng.integers(1, max_devices + 1))
    devices = DeviceSet(random_device(rng) for _ in range(m))
    r = rng.uniform(0.0, sum(d.d_max for d in devices) + 0.5)
    return devices, random_tariff(rng), float(r)
