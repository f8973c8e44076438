"""Customer, utility and environmental surplus over a scenario set.

A fraction ``gamma`` of the (representative) population are prosumers with
renewable output ``r_n`` in scenario ``n``; the rest are consumers without
on-site generation.  Payments are transfers between customers and the
utility, which buys the customers' aggregate net demand at the wholesale
price and carries a fixed cost per customer and billing period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from nemx.devices import DeviceUtility
from nemx.errors import InvalidParameterError
from nemx.scheduler import Zone, optimal_schedule, schedule_batch, _ZONE_BY_CODE
from nemx.tariff import CustomerTariffs, TariffParams, TouTariff, params_at, payment

WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class Scenario:
    index: int
    r: float
    wholesale_price: float
    hour: int = 0
    weight: float = 1.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.r) or self.r < 0:
            raise InvalidParameterError(f"scenario {self.index}: r must be finite and >= 0")
        if not math.isfinite(self.wholesale_price):
            raise InvalidParameterError(f"scenario {self.index}: wholesale price must be finite")
        if not 0 <= self.hour < 24:
            raise InvalidParameterError(f"scenario {self.index}: hour must lie in [0,24)")
        if not self.weight > 0:
            raise InvalidParameterError(f"scenario {self.index}: weight must be > 0")


class ScenarioSet(tuple):
    """Non-empty, weight-normalized sequence of scenarios."""

    def __new__(cls, scenarios: Iterable[Scenario]) -> ScenarioSet:
        scenarios = tuple(scenarios)
        if not scenarios:
            raise InvalidParameterError("scenario set is empty")
        total = math.fsum(s.weight for s in scenarios)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise InvalidParameterError(f"scenario weights sum to {total!r}, expected 1")
        return super().__new__(cls, scenarios)

    @classmethod
    def equal_weights(cls, rows: Iterable[tuple[float, float, int]]) -> ScenarioSet:
        """Build from ``(r, wholesale_price, hour)`` rows with weights 1/N."""
        rows = list(rows)
        if not rows:
            raise InvalidParameterError("scenario set is empty")
        w = 1.0 / len(rows)
        return cls(Scenario(i, r, p, h, w) for i, (r, p, h) in enumerate(rows))

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        r = np.array([s.r for s in self])
        price = np.array([s.wholesale_price for s in self])
        w = np.array([s.weight for s in self])
        return r, price, w


@dataclass(frozen=True)
class CostModel:
    """Utility cost and externality prices.

    ``fixed_cost_per_customer`` is charged per billing period.  The social
    marginal cost is the wholesale price plus ``smc_adder``.
    """

    fixed_cost_per_customer: float = 0.0
    smc_adder: float = 0.030
    env_price: float = 0.0

    def __post_init__(self) -> None:
        for name in ("fixed_cost_per_customer", "smc_adder", "env_price"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise InvalidParameterError(f"{name} must be finite and >= 0, got {v}")

    def smc_price(self, scen: Scenario) -> float:
        return scen.wholesale_price + self.smc_adder

    def cost(self, scen: Scenario, net_demand: float) -> float:
        return scen.wholesale_price * net_demand + self.fixed_cost_per_customer


def resolve_tariff(tariff, scen: Scenario) -> tuple[TariffParams, TariffParams]:
    """``(prosumer, consumer)`` parameters in force for ``scen``.

    Accepts a flat ``TariffParams``, a ``TouTariff``, ``CustomerTariffs`` or any
    object with a ``for_scenario(scen)`` method returning the pair.
    """
    if isinstance(tariff, TariffParams):
        return tariff, tariff
    if isinstance(tariff, TouTariff):
        p = params_at(tariff, scen.hour)
        return p, p
    if isinstance(tariff, CustomerTariffs):
        return tariff.params_at(scen.hour)
    if hasattr(tariff, "for_scenario"):
        return tariff.for_scenario(scen)
    raise TypeError(f"unsupported tariff type {type(tariff).__name__}")


def _check_gamma(gamma: float) -> None:
    if not 0.0 <= gamma <= 1.0:
        raise InvalidParameterError(f"adoption fraction must lie in [0,1], got {gamma}")


def customer_surplus(devices, tariff, scen: Scenario, gamma: float) -> float:
    _check_gamma(gamma)
    pro, con = resolve_tariff(tariff, scen)
    s_p = optimal_schedule(devices, pro, scen.r).surplus
    s_c = optimal_schedule(devices, con, 0.0).surplus
    return gamma * s_p + (1.0 - gamma) * s_c


def utility_surplus(devices, tariff, cost: CostModel, scen: Scenario, gamma: float) -> float:
    _check_gamma(gamma)
    pro, con = resolve_tariff(tariff, scen)
    sp = optimal_schedule(devices, pro, scen.r)
    sc = optimal_schedule(devices, con, 0.0)
    y = gamma * sp.net + (1.0 - gamma) * sc.net
    revenue = gamma * sp.payment + (1.0 - gamma) * sc.payment
    return revenue - cost.cost(scen, y)


def env_benefit(cost: CostModel, scen: Scenario) -> float:
    return cost.env_price * scen.r


@dataclass(frozen=True)
class ScenarioWelfare:
    index: int
    hour: int
    r: float
    wholesale_price: float
    weight: float
    prosumer_zone: Zone
    prosumer_net: float
    consumer_net: float
    prosumer_surplus: float
    consumer_surplus: float
    prosumer_payment: float
    consumer_payment: float
    customer_surplus: float
    utility_surplus: float
    env_benefit: float

    @property
    def bill_saving(self) -> float:
        return self.consumer_payment - self.prosumer_payment


@dataclass(frozen=True)
class WelfareBreakdown:
    """Expected per-billing-period welfare terms for one tariff and ``gamma``.

    ``env_benefit`` is already scaled by ``gamma`` so that
    ``welfare == customer_surplus + utility_surplus + env_benefit``.
    ``prosumer_surplus`` and ``consumer_surplus`` are the unmixed expected
    surpluses of one prosumer and one consumer.
    """

    gamma: float
    customer_surplus: float
    utility_surplus: float
    env_benefit: float
    welfare: float
    prosumer_surplus: float
    consumer_surplus: float
    details: tuple[ScenarioWelfare, ...] = ()


@dataclass(frozen=True)
class PriceArrays:
    """Per-scenario tariff parameters for prosumers and consumers."""

    pro_retail: np.ndarray
    pro_sell: np.ndarray
    pro_fixed: np.ndarray
    con_retail: np.ndarray
    con_sell: np.ndarray
    con_fixed: np.ndarray


def price_arrays(tariff, scens: Sequence[Scenario]) -> PriceArrays:
    if hasattr(tariff, "price_arrays"):
        return tariff.price_arrays(scens)
    pairs = [resolve_tariff(tariff, s) for s in scens]
    col = lambda side, f: np.array([getattr(p[side], f) for p in pairs])  # noqa: E731
    return PriceArrays(
        col(0, "retail_rate"), col(0, "sell_rate"), col(0, "fixed_charge"),
        col(1, "retail_rate"), col(1, "sell_rate"), col(1, "fixed_charge"),
    )


def _payments(retail, sell, fixed, z):
    return np.where(z >= 0, retail * z, sell * z) + fixed


def social_welfare(
    devices: Sequence[DeviceUtility],
    tariff,
    cost: CostModel,
    scens: ScenarioSet,
    gamma: float,
    with_details: bool = True,
) -> WelfareBreakdown:
    _check_gamma(gamma)
    r, wholesale, w = scens.arrays()
    pa = price_arrays(tariff, scens)

    pro = schedule_batch(devices, pa.pro_retail, pa.pro_sell, r)
    con = schedule_batch(devices, pa.con_retail, pa.con_sell, np.zeros_like(r))
    z_p = pro.total - r
    z_c = con.total
    pay_p = _payments(pa.pro_retail, pa.pro_sell, pa.pro_fixed, z_p)
    pay_c = _payments(pa.con_retail, pa.con_sell, pa.con_fixed, z_c)
    s_p = pro.utility - pay_p
    s_c = con.utility - pay_c

    cs = gamma * s_p + (1.0 - gamma) * s_c
    y = gamma * z_p + (1.0 - gamma) * z_c
    us = gamma * pay_p + (1.0 - gamma) * pay_c - (wholesale * y + cost.fixed_cost_per_customer)
    env = gamma * cost.env_price * r

    cs_tot = math.fsum(w * cs)
    us_tot = math.fsum(w * us)
    env_tot = math.fsum(w * env)
    details: tuple[ScenarioWelfare, ...] = ()
    if with_details:
        details = tuple(
            ScenarioWelfare(
                index=s.index, hour=s.hour, r=s.r, wholesale_price=s.wholesale_price,
                weight=s.weight, prosumer_zone=_ZONE_BY_CODE[int(pro.zone[k])],
                prosumer_net=float(z_p[k]), consumer_net=float(z_c[k]),
                prosumer_surplus=float(s_p[k]), consumer_surplus=float(s_c[k]),
                prosumer_payment=float(pay_p[k]), consumer_payment=float(pay_c[k]),
                customer_surplus=float(cs[k]), utility_surplus=float(us[k]),
                env_benefit=float(env[k]),
            )
            for k, s in enumerate(scens)
        )
    return WelfareBreakdown(
        gamma=gamma,
        customer_surplus=cs_tot,
        utility_surplus=us_tot,
        env_benefit=env_tot,
        welfare=cs_tot + us_tot + env_tot,
        prosumer_surplus=math.fsum(w * s_p),
        consumer_surplus=math.fsum(w * s_c),
        details=details,
    )
