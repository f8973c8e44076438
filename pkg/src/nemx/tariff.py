"""NEM X retail tariffs and the per-billing-period payment schedule.

A tariff is the tuple ``(retail_rate, sell_rate, fixed_charge)``.  Net
consumption ``z >= 0`` is billed at the retail rate, net production at the
sell rate, and the fixed charge is added in every billing period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

from nemx.errors import InvalidParameterError

HOURS_PER_DAY = 24


@dataclass(frozen=True)
class TariffParams:
    retail_rate: float
    sell_rate: float
    fixed_charge: float = 0.0

    def __post_init__(self) -> None:
        for name in ("retail_rate", "sell_rate", "fixed_charge"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")
        if self.retail_rate < 0 or self.sell_rate < 0:
            raise InvalidParameterError(
                f"rates must be non-negative (retail={self.retail_rate}, sell={self.sell_rate})"
            )
        if self.sell_rate > self.retail_rate:
            raise InvalidParameterError(
                f"sell rate {self.sell_rate} exceeds retail rate {self.retail_rate}"
            )

    def with_fixed_charge(self, fixed_charge: float) -> TariffParams:
        return replace(self, fixed_charge=fixed_charge)


@dataclass(frozen=True)
class TouPeriod:
    start_hour: int
    end_hour: int
    params: TariffParams

    def contains(self, hour: int) -> bool:
        return self.start_hour <= hour < self.end_hour


@dataclass(frozen=True)
class TouTariff:
    """Hour-of-day schedule of tariff parameters.

    Periods are half-open ``[start_hour, end_hour)`` ranges that must tile
    ``[0, 24)`` exactly.  They are kept sorted by start hour.
    """

    periods: tuple[TouPeriod, ...]

    def __post_init__(self) -> None:
        periods = tuple(sorted(self.periods, key=lambda p: p.start_hour))
        object.__setattr__(self, "periods", periods)
        if not periods:
            raise InvalidParameterError("TOU tariff needs at least one period")
        cursor = 0
        for p in periods:
            if p.start_hour != cursor:
                kind = "overlap" if p.start_hour < cursor else "gap"
                raise InvalidParameterError(
                    f"TOU periods must partition [0,24): {kind} at hour {min(cursor, p.start_hour)}"
                )
            if p.end_hour <= p.start_hour:
                raise InvalidParameterError(
                    f"empty TOU period [{p.start_hour},{p.end_hour})"
                )
            cursor = p.end_hour
        if cursor != HOURS_PER_DAY:
            raise InvalidParameterError(f"TOU periods end at hour {cursor}, expected 24")

    @classmethod
    def flat(cls, params: TariffParams) -> TouTariff:
        return cls((TouPeriod(0, HOURS_PER_DAY, params),))

    @classmethod
    def from_ranges(
        cls, ranges: Sequence[tuple[int, int, TariffParams]]
    ) -> TouTariff:
        return cls(tuple(TouPeriod(s, e, p) for s, e, p in ranges))

    @classmethod
    def peak_window(
        cls, off_peak: TariffParams, peak: TariffParams, start: int, end: int
    ) -> TouTariff:
        """Two-level schedule with ``peak`` on ``[start, end)`` and ``off_peak`` elsewhere."""
        if not 0 <= start < end <= HOURS_PER_DAY:
            raise InvalidParameterError(f"invalid peak window [{start},{end})")
        ranges = []
        if start > 0:
            ranges.append((0, start, off_peak))
        ranges.append((start, end, peak))
        if end < HOURS_PER_DAY:
            ranges.append((end, HOURS_PER_DAY, off_peak))
        return cls.from_ranges(ranges)


def payment(params: TariffParams, z: float) -> float:
    """Payment for one billing period at net consumption ``z`` (kWh).

    ``z == 0`` takes the retail branch; both branches agree there.
    """
    if not math.isfinite(z):
        raise InvalidParameterError(f"net consumption must be finite, got {z}")
    rate = params.retail_rate if z >= 0 else params.sell_rate
    return rate * z + params.fixed_charge


def params_at(tou: TouTariff, hour: int) -> TariffParams:
    if not 0 <= hour < HOURS_PER_DAY:
        raise InvalidParameterError(f"hour must lie in [0,24), got {hour}")
    for period in tou.periods:
        if period.contains(hour):
            return period.params
    raise AssertionError("unreachable: TOU periods partition the day")


def with_sell_offset(params: TariffParams, delta: float) -> TariffParams:
    """Copy of ``params`` whose sell rate sits ``delta`` below the retail rate."""
    if delta < 0:
        raise InvalidParameterError(f"sell offset must be non-negative, got {delta}")
    if delta > params.retail_rate:
        raise InvalidParameterError(
            f"sell offset {delta} exceeds retail rate {params.retail_rate}"
        )
    return replace(params, sell_rate=params.retail_rate - delta)


def capacity_charge_per_period(
    cbc_rate: float, pv_kw: float, days_in_month: float = 30.0, periods_per_day: int = 24
) -> float:
    """Prorate a capacity-based charge ($/kW/month) to one billing period."""
    if cbc_rate < 0 or pv_kw <= 0 or days_in_month <= 0 or periods_per_day <= 0:
        raise InvalidParameterError("capacity charge inputs must be positive")
    return cbc_rate * pv_kw / days_in_month / periods_per_day


@dataclass(frozen=True)
class CustomerTariffs:
    """Separate schedules for prosumers and consumers.

    Uniform tariffs use the same schedule for both classes; discriminatory
    ones (e.g. a capacity charge levied on prosumers only) differ.
    """

    prosumer: TouTariff
    consumer: TouTariff

    def __post_init__(self) -> None:
        for side in ("prosumer", "consumer"):
            t = getattr(self, side)
            if isinstance(t, TariffParams):
                object.__setattr__(self, side, TouTariff.flat(t))
            elif not isinstance(t, TouTariff):
                raise InvalidParameterError(f"{side}: expected TariffParams or TouTariff")

    @classmethod
    def uniform(cls, tariff: TariffParams | TouTariff) -> CustomerTariffs:
        return cls(tariff, tariff)

    def params_at(self, hour: int) -> tuple[TariffParams, TariffParams]:
        return params_at(self.prosumer, hour), params_at(self.consumer, hour)
