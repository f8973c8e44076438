"""Bill savings, cost-shift and DER payback time."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from nemx.devices import DeviceUtility
from nemx.errors import InvalidParameterError
from nemx.scheduler import optimal_schedule
from nemx.tariff import payment
from nemx.welfare import CostModel, Scenario, ScenarioSet, WelfareBreakdown, resolve_tariff, social_welfare

DAYS_PER_YEAR = 365
DEFAULT_HORIZON = 50


@dataclass(frozen=True)
class PaybackParams:
    install_cost: float
    degradation: float = 0.0
    interest: float = 0.0
    horizon_years: int = DEFAULT_HORIZON

    def __post_init__(self) -> None:
        if not self.install_cost > 0:
            raise InvalidParameterError(f"install cost must be > 0, got {self.install_cost}")
        for name in ("degradation", "interest"):
            v = getattr(self, name)
            if not 0 <= v < 1:
                raise InvalidParameterError(f"{name} must lie in [0,1), got {v}")
        if self.horizon_years < 1:
            raise InvalidParameterError("horizon must be at least one year")

    @property
    def discount(self) -> float:
        return (1 - self.degradation) / (1 + self.interest)


@dataclass(frozen=True)
class PaybackResult:
    """``years`` is None when savings never cover the cost within the horizon.

    ``simple_years`` is the undiscounted ratio cost/saving, None unless the
    saving is positive.
    """

    years: int | None
    simple_years: float | None

    @property
    def never(self) -> bool:
        return self.years is None


@dataclass(frozen=True)
class MetricsReport:
    expected_bill_saving: float
    annual_bill_saving: float
    cost_shift: float
    payback: PaybackResult


def bill_saving(devices: Sequence[DeviceUtility], tariff, scen: Scenario) -> float:
    """Consumer-tariff bill without generation minus the prosumer's bill."""
    pro, con = resolve_tariff(tariff, scen)
    z_c = optimal_schedule(devices, con, 0.0).net
    z_p = optimal_schedule(devices, pro, scen.r).net
    return payment(con, z_c) - payment(pro, z_p)


def expected_bill_saving(devices, tariff, scens: ScenarioSet) -> float:
    wb = social_welfare(devices, tariff, CostModel(), scens, 1.0)
    return math.fsum(d.weight * d.bill_saving for d in wb.details)


def cost_shift_from(wb: WelfareBreakdown, cost: CostModel, gamma: float) -> float:
    n = len(wb.details)
    return math.fsum(
        gamma * d.weight * n * (d.bill_saving - (d.wholesale_price + cost.smc_adder) * d.r)
        for d in wb.details
    )


def cost_shift(devices, tariff, cost: CostModel, scens: ScenarioSet, gamma: float) -> float:
    """Expected prosumer bill saving above the avoided cost at the SMC price.

    Summed over the ``N`` billing periods of the rate cycle for a population
    with prosumer fraction ``gamma``.
    """
    if not 0 <= gamma <= 1:
        raise InvalidParameterError(f"adoption fraction must lie in [0,1], got {gamma}")
    wb = social_welfare(devices, tariff, cost, scens, gamma)
    return cost_shift_from(wb, cost, gamma)


def annualize(saving_per_period: float, periods_per_day: int = 24) -> float:
    return saving_per_period * periods_per_day * DAYS_PER_YEAR


def payback_time(expected_saving_per_year: float, pb: PaybackParams) -> PaybackResult:
    """Smallest ``t`` with ``sum_{k=0..t} q**k * saving >= cost``, ``q = (1-nu)/(1+zeta)``."""
    saving = expected_saving_per_year
    if not math.isfinite(saving):
        raise InvalidParameterError("expected saving must be finite")
    simple = pb.install_cost / saving if saving > 0 else None
    if saving <= 0:
        return PaybackResult(None, simple)
    q = pb.discount
    cumulative = 0.0
    factor = 1.0
    for t in range(pb.horizon_years + 1):
        cumulative += factor * saving
        if cumulative >= pb.install_cost:
            return PaybackResult(t, simple)
        factor *= q
    return PaybackResult(None, simple)


def policy_metrics(
    devices,
    tariff,
    cost: CostModel,
    scens: ScenarioSet,
    gamma: float,
    pb: PaybackParams,
    periods_per_day: int = 24,
) -> MetricsReport:
    wb = social_welfare(devices, tariff, cost, scens, gamma)
    return metrics_from(wb, cost, gamma, pb, periods_per_day)


def metrics_from(
    wb: WelfareBreakdown, cost: CostModel, gamma: float, pb: PaybackParams, periods_per_day: int = 24
) -> MetricsReport:
    saving = math.fsum(d.weight * d.bill_saving for d in wb.details)
    annual = annualize(saving, periods_per_day)
    return MetricsReport(
        expected_bill_saving=saving,
        annual_bill_saving=annual,
        cost_shift=cost_shift_from(wb, cost, gamma),
        payback=payback_time(annual, pb),
    )
