"""Break-even (Ramsey) retail rate setting for NEM X policy templates.

A policy template fixes everything about a tariff except one scalar, the
base (off-peak) retail rate: how the sell rate follows it, the fixed charges
and the TOU peak multiplier.  The solver finds the base rate at which the
utility's expected surplus is zero and evaluates welfare there.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from nemx.devices import DeviceUtility
from nemx.errors import InvalidParameterError, SolverError
from nemx.tariff import TariffParams, capacity_charge_per_period
from nemx.welfare import (
    CostModel,
    PriceArrays,
    Scenario,
    ScenarioSet,
    WelfareBreakdown,
    social_welfare,
)

BREAKEVEN_TOL = 1e-6
RETAIL_XTOL = 1e-12
DEFAULT_BRACKET = (0.001, 5.0)
SCAN_POINTS = 64
MAX_ITER = 200


class PolicyKind(enum.Enum):
    NEM_1_0 = "NEM_1_0"
    NEM_2_0 = "NEM_2_0_offset"
    NEM_SMC = "NEM_SMC"
    NEM_CBC = "NEM_CBC"


class SellRule(enum.Enum):
    EQUAL = "equal"
    OFFSET = "offset"
    SMC = "smc"


_SELL_RULE = {
    PolicyKind.NEM_1_0: SellRule.EQUAL,
    PolicyKind.NEM_2_0: SellRule.OFFSET,
    PolicyKind.NEM_SMC: SellRule.SMC,
    PolicyKind.NEM_CBC: SellRule.OFFSET,
}


@dataclass(frozen=True)
class TouShape:
    peak_start: int = 16
    peak_end: int = 21
    peak_ratio: float = 1.5

    def __post_init__(self) -> None:
        if not 0 <= self.peak_start < self.peak_end <= 24:
            raise InvalidParameterError(
                f"invalid peak window [{self.peak_start},{self.peak_end})"
            )
        if not self.peak_ratio >= 1:
            raise InvalidParameterError(f"peak ratio must be >= 1, got {self.peak_ratio}")

    def multiplier(self, hour: int) -> float:
        return self.peak_ratio if self.peak_start <= hour < self.peak_end else 1.0


@dataclass(frozen=True)
class PolicyTemplate:
    """One NEM X policy with the retail rate left free.

    ``fixed_charge`` is a uniform charge per billing period on every
    customer.  For ``NEM_CBC`` a capacity charge of ``cbc_rate`` $/kW/month
    on ``pv_kw`` of installed PV is added for prosumers only, prorated to a
    billing period.
    """

    name: str
    kind: PolicyKind
    sell_offset: float = 0.0
    fixed_charge: float = 0.0
    cbc_rate: float = 0.0
    pv_kw: float = 0.0
    tou: TouShape | None = None
    days_in_month: float = 30.0
    periods_per_day: int = 24

    def __post_init__(self) -> None:
        if not self.sell_offset >= 0:
            raise InvalidParameterError(f"{self.name}: sell offset must be >= 0")
        if self.kind is PolicyKind.NEM_CBC and not (self.cbc_rate > 0 and self.pv_kw > 0):
            raise InvalidParameterError(f"{self.name}: NEM_CBC needs cbc_rate > 0 and pv_kw > 0")

    @property
    def sell_rule(self) -> SellRule:
        return _SELL_RULE[self.kind]

    @property
    def prosumer_extra_charge(self) -> float:
        if self.kind is not PolicyKind.NEM_CBC:
            return 0.0
        return capacity_charge_per_period(
            self.cbc_rate, self.pv_kw, self.days_in_month, self.periods_per_day
        )

    def min_retail(self, cost: CostModel, scens: Sequence[Scenario]) -> float:
        """Smallest base retail rate for which every period keeps sell <= retail."""
        if self.sell_rule is SellRule.OFFSET:
            return self.sell_offset
        if self.sell_rule is SellRule.SMC:
            mult = self.tou.multiplier if self.tou else (lambda h: 1.0)
            return max(max(cost.smc_price(s) / mult(s.hour), 0.0) for s in scens)
        return 0.0

    def instantiate(self, retail: float, cost: CostModel) -> PolicyTariff:
        return PolicyTariff(self, retail, cost)


@dataclass(frozen=True)
class PolicyTariff:
    """A template evaluated at a concrete base retail rate."""

    template: PolicyTemplate
    retail: float
    cost: CostModel

    def _retail_at(self, hour: int) -> float:
        tou = self.template.tou
        return self.retail * (tou.multiplier(hour) if tou else 1.0)

    def _sell(self, retail: float, scen: Scenario) -> float:
        rule = self.template.sell_rule
        if rule is SellRule.EQUAL:
            return retail
        if rule is SellRule.OFFSET:
            return retail - self.template.sell_offset
        return self.cost.smc_price(scen)

    def for_scenario(self, scen: Scenario) -> tuple[TariffParams, TariffParams]:
        retail = self._retail_at(scen.hour)
        sell = self._sell(retail, scen)
        fixed = self.template.fixed_charge
        pro = TariffParams(retail, sell, fixed + self.template.prosumer_extra_charge)
        con = TariffParams(retail, sell, fixed)
        return pro, con

    def price_arrays(self, scens: Sequence[Scenario]) -> PriceArrays:
        tpl = self.template
        hours = np.array([s.hour for s in scens])
        retail = np.full(len(scens), float(self.retail))
        if tpl.tou is not None:
            peak = (hours >= tpl.tou.peak_start) & (hours < tpl.tou.peak_end)
            retail = np.where(peak, retail * tpl.tou.peak_ratio, retail)
        if tpl.sell_rule is SellRule.EQUAL:
            sell = retail.copy()
        elif tpl.sell_rule is SellRule.OFFSET:
            sell = retail - tpl.sell_offset
        else:
            sell = np.array([self.cost.smc_price(s) for s in scens])
        if np.any(retail < 0) or np.any(sell < 0) or np.any(sell > retail):
            raise InvalidParameterError(
                f"{tpl.name}: retail {self.retail} gives an invalid tariff (need 0 <= sell <= retail)"
            )
        fixed = np.full(len(scens), float(tpl.fixed_charge))
        return PriceArrays(
            retail, sell, fixed + tpl.prosumer_extra_charge, retail, sell, fixed.copy()
        )


@dataclass(frozen=True)
class RateSolution:
    policy: str
    gamma: float
    feasible: bool
    retail: float | None = None
    peak_retail: float | None = None
    sell: float | None = None
    fixed: float = 0.0
    residual: float | None = None
    welfare: WelfareBreakdown | None = None
    iterations: int = 0
    sign_changes: int = 0
    bracket: tuple[float, float] = DEFAULT_BRACKET
    message: str = ""
    tariff: PolicyTariff | None = field(default=None, repr=False, compare=False)


def breakeven_residual(
    template: PolicyTemplate,
    retail: float,
    devices: Sequence[DeviceUtility],
    cost: CostModel,
    scens: ScenarioSet,
    gamma: float,
) -> float:
    """Expected utility surplus with the template priced at ``retail``."""
    if not retail > 0:
        raise InvalidParameterError(f"retail rate must be > 0, got {retail}")
    tariff = template.instantiate(retail, cost)
    return social_welfare(devices, tariff, cost, scens, gamma, with_details=False).utility_surplus


def _describe(template: PolicyTemplate, tariff: PolicyTariff, scens: ScenarioSet) -> dict:
    pa = tariff.price_arrays(scens)
    w = np.array([s.weight for s in scens])
    peak = tariff.retail * (template.tou.peak_ratio if template.tou else 1.0)
    return {
        "peak_retail": peak,
        "sell": math.fsum(w * pa.pro_sell),
        "fixed": float(pa.pro_fixed[0]),
    }


def solve_breakeven(
    template: PolicyTemplate,
    devices: Sequence[DeviceUtility],
    cost: CostModel,
    scens: ScenarioSet,
    gamma: float,
    bracket: tuple[float, float] = DEFAULT_BRACKET,
    tol: float = BREAKEVEN_TOL,
    xtol: float = RETAIL_XTOL,
    scan_points: int = SCAN_POINTS,
    max_iter: int = MAX_ITER,
) -> RateSolution:
    """Smallest base retail rate in ``bracket`` where the utility breaks even.

    The bracket is first clipped to the rates the template admits (sell rate
    non-negative and not above retail), then scanned at ``scan_points``
    evenly spaced rates.  The first sign change of the residual is refined by
    bisection until ``|residual| <= tol`` and the rate interval is below
    ``xtol`` (relative to the rate).  With no sign change the solution is
    reported infeasible.
    """
    lo, hi = map(float, bracket)
    if not (math.isfinite(lo) and math.isfinite(hi) and 0 < lo < hi):
        raise InvalidParameterError(f"invalid bracket {bracket}")
    if scan_points < 2:
        raise InvalidParameterError("scan_points must be >= 2")
    lo = max(lo, template.min_retail(cost, scens))
    base = dict(policy=template.name, gamma=gamma, bracket=(lo, hi))
    if lo >= hi:
        return RateSolution(feasible=False, message="template admits no rate in bracket", **base)

    def residual(x: float) -> float:
        v = breakeven_residual(template, x, devices, cost, scens, gamma)
        if not math.isfinite(v):
            raise SolverError(f"non-finite break-even residual at retail={x}")
        return v

    xs = np.linspace(lo, hi, scan_points)
    # lo may sit exactly on the admissible edge; linspace endpoints are exact.
    res = [residual(float(x)) for x in xs]
    n_evals = len(xs)
    signs = np.sign(res)
    changes = [i for i in range(len(xs) - 1) if signs[i] * signs[i + 1] < 0 or signs[i] == 0]
    if signs[-1] == 0:
        changes.append(len(xs) - 1)
    base["sign_changes"] = len(changes)
    if not changes:
        kind = "negative" if res[0] < 0 else "positive"
        return RateSolution(
            feasible=False, iterations=n_evals,
            message=f"break-even residual {kind} across bracket", **base,
        )

    i = changes[0]
    if signs[i] == 0:
        x_best, r_best = float(xs[i]), res[i]
    else:
        a, b = float(xs[i]), float(xs[i + 1])
        fa = res[i]
        x_best, r_best = (a, fa) if abs(fa) <= abs(res[i + 1]) else (b, res[i + 1])
        for _ in range(max_iter):
            mid = 0.5 * (a + b)
            if mid in (a, b):
                break
            fm = residual(mid)
            n_evals += 1
            if abs(fm) <= abs(r_best):
                x_best, r_best = mid, fm
            if fm == 0:
                break
            if (fm < 0) == (fa < 0):
                a, fa = mid, fm
            else:
                b = mid
            if abs(r_best) <= tol and b - a <= xtol * max(1.0, abs(mid)):
                break
    if abs(r_best) > tol:
        raise SolverError(
            f"{template.name}: bisection ended with residual {r_best:.3g} > tol {tol:g}"
        )

    tariff = template.instantiate(x_best, cost)
    wb = social_welfare(devices, tariff, cost, scens, gamma)
    desc = _describe(template, tariff, scens)
    return RateSolution(
        feasible=True,
        retail=x_best,
        residual=wb.utility_surplus,
        welfare=wb,
        iterations=n_evals,
        tariff=tariff,
        **desc,
        **base,
    )


def sweep_adoption(
    template: PolicyTemplate,
    devices: Sequence[DeviceUtility],
    cost: CostModel,
    scens: ScenarioSet,
    gammas: Sequence[float],
    **solver_kw,
) -> list[RateSolution]:
    gammas = list(gammas)
    if any(not 0 <= g <= 1 for g in gammas):
        raise InvalidParameterError("adoption fractions must lie in [0,1]")
    if any(g1 > g2 for g1, g2 in zip(gammas, gammas[1:])):
        raise InvalidParameterError("adoption fractions must be ascending")
    return [solve_breakeven(template, devices, cost, scens, g, **solver_kw) for g in gammas]
