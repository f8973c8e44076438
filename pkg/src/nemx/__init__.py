"""NEM X retail tariffs, optimal prosumer scheduling and Ramsey rate setting."""

from nemx.devices import DeviceSet, DeviceUtility, inverse_marginal_clamped, marginal, utility
from nemx.errors import (
    ConfigError,
    DataError,
    InfeasibleError,
    InvalidParameterError,
    NemError,
    SolverError,
)
from nemx.kernels import BACKEND
from nemx.metrics import (
    MetricsReport,
    PaybackParams,
    PaybackResult,
    bill_saving,
    cost_shift,
    payback_time,
    policy_metrics,
)
from nemx.ramsey import (
    PolicyKind,
    PolicyTemplate,
    RateSolution,
    TouShape,
    breakeven_residual,
    solve_breakeven,
    sweep_adoption,
)
from nemx.scheduler import (
    Priority,
    Schedule,
    Thresholds,
    Zone,
    brute_force_schedule,
    classify_device,
    demand_curve,
    optimal_schedule,
    thresholds,
)
from nemx.tariff import CustomerTariffs, TariffParams, TouTariff, params_at, payment, with_sell_offset
from nemx.welfare import (
    CostModel,
    Scenario,
    ScenarioSet,
    WelfareBreakdown,
    customer_surplus,
    env_benefit,
    social_welfare,
    utility_surplus,
)

__version__ = "0.1.0"
