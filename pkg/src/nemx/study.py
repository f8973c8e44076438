"""Full policy study: break-even rates, welfare and metrics per policy and gamma.

Reports are written to a temporary directory next to the output directory
and moved into place only after every file has been written.
"""

from __future__ import annotations

import csv
import io
import json
import os
import shutil
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from nemx.config import StudyConfig
from nemx.data import build_scenarios, load_timeseries
from nemx.errors import ConfigError
from nemx.metrics import MetricsReport, metrics_from
from nemx.ramsey import RateSolution, solve_breakeven
from nemx.welfare import ScenarioSet

RATES_HEADER = ["gamma", "policy", "retail", "sell", "fixed", "welfare", "cs", "us", "env", "feasible"]
WELFARE_HEADER = [
    "policy", "gamma", "index", "hour", "r", "wholesale_price", "prosumer_zone",
    "prosumer_net", "consumer_net", "prosumer_surplus", "consumer_surplus",
    "customer_surplus", "utility_surplus", "env_benefit",
]
METRICS_HEADER = [
    "policy", "gamma", "retail", "expected_bill_saving", "annual_bill_saving",
    "cost_shift", "cost_shift_per_day", "payback_years", "simple_payback_years",
]
REPORT_FILES = ("rates.csv", "welfare.csv", "metrics.csv", "summary.json")


@dataclass(frozen=True)
class StudyCell:
    solution: RateSolution
    metrics: MetricsReport | None


@dataclass(frozen=True)
class StudyResult:
    scenarios: ScenarioSet
    cells: tuple[StudyCell, ...]

    def cell(self, policy: str, gamma: float) -> StudyCell:
        for c in self.cells:
            if c.solution.policy == policy and c.solution.gamma == gamma:
                return c
        raise KeyError((policy, gamma))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def load_scenarios(config: StudyConfig) -> ScenarioSet:
    if config.prices_path is None or config.generation_path is None:
        raise ConfigError("data: both 'prices' and 'generation' files are required")
    prices = load_timeseries(config.prices_path, "price")
    gen = load_timeseries(config.generation_path, "generation")
    return build_scenarios(prices, gen, config.resample_hours)


def compute_study(
    config: StudyConfig, scens: ScenarioSet, gammas: Sequence[float] | None = None
) -> StudyResult:
    if not config.policies:
        raise ConfigError("policies: at least one policy is required")
    if config.payback is None:
        raise ConfigError("payback: section is required for a study")
    gammas = tuple(config.gammas if gammas is None else gammas)
    cells = []
    for tpl in config.policies:
        for g in gammas:
            sol = solve_breakeven(tpl, config.devices, config.cost, scens, g, **config.solver.kwargs())
            metrics = None
            if sol.feasible:
                metrics = metrics_from(sol.welfare, config.cost, g, config.payback,
                                       config.periods_per_day)
            cells.append(StudyCell(sol, metrics))
    return StudyResult(scens, tuple(cells))


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def render_rates(cells: Sequence[StudyCell]) -> str:
    rows = []
    for c in cells:
        s = c.solution
        wb = s.welfare
        rows.append([
            s.gamma, s.policy, s.retail, s.sell, s.fixed if s.feasible else None,
            wb and wb.welfare, wb and wb.customer_surplus, wb and wb.utility_surplus,
            wb and wb.env_benefit, s.feasible,
        ])
    return _csv_text(RATES_HEADER, rows)


def render_reports(result: StudyResult, config: StudyConfig) -> dict[str, str]:
    n = len(result.scenarios)
    cycle_days = n / config.periods_per_day
    welfare_rows, metric_rows, summary_cells = [], [], []
    for c in result.cells:
        s = c.solution
        summary_cells.append({
            "policy": s.policy,
            "gamma": s.gamma,
            "feasible": s.feasible,
            "retail": s.retail,
            "residual": s.residual,
            "evaluations": s.iterations,
            "sign_changes": s.sign_changes,
            "bracket": list(s.bracket),
            "message": s.message,
        })
        if not s.feasible:
            metric_rows.append([s.policy, s.gamma] + [None] * 7)
            continue
        for d in s.welfare.details:
            welfare_rows.append([
                s.policy, s.gamma, d.index, d.hour, d.r, d.wholesale_price, d.prosumer_zone.value,
                d.prosumer_net, d.consumer_net, d.prosumer_surplus, d.consumer_surplus,
                d.customer_surplus, d.utility_surplus, d.env_benefit,
            ])
        m = c.metrics
        metric_rows.append([
            s.policy, s.gamma, s.retail, m.expected_bill_saving, m.annual_bill_saving,
            m.cost_shift, m.cost_shift / cycle_days,
            "never" if m.payback.never else m.payback.years, m.payback.simple_years,
        ])
    summary = {
        "scenarios": n,
        "periods_per_day": config.periods_per_day,
        "cycle_days": cycle_days,
        "policies": [p.name for p in config.policies],
        "gammas": sorted({c.solution.gamma for c in result.cells}),
        "cells": summary_cells,
    }
    return {
        "rates.csv": render_rates(result.cells),
        "welfare.csv": _csv_text(WELFARE_HEADER, welfare_rows),
        "metrics.csv": _csv_text(METRICS_HEADER, metric_rows),
        "summary.json": json.dumps(summary, indent=2, sort_keys=True) + "\n",
    }


def write_reports_atomic(files: dict[str, str], out_dir: Path) -> None:
    out_dir = Path(out_dir)
    out_dir.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=f".{out_dir.name}.tmp-", dir=out_dir.parent))
    try:
        for name, text in files.items():
            (tmp / name).write_text(text)
        out_dir.mkdir(exist_ok=True)
        for name in files:
            os.replace(tmp / name, out_dir / name)
    finally:
        shutil.rmtree(tmp, ignore_errors=True)


def run_study(
    config: StudyConfig, out_dir: Path | None = None, gammas: Sequence[float] | None = None
) -> StudyResult:
    out_dir = out_dir or config.output_dir
    if out_dir is None:
        raise ConfigError("output_dir: no output directory given (use --out)")
    scens = load_scenarios(config)
    result = compute_study(config, scens, gammas)
    write_reports_atomic(render_reports(result, config), out_dir)
    return result
