"""Command line interface.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 solver
failure or infeasible break-even.  Errors are also printed to stderr as a
one-line JSON record.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from nemx import kernels
from nemx.config import StudyConfig, load_config
from nemx.errors import ConfigError, InfeasibleError, NemError
from nemx.metrics import PaybackParams, payback_time
from nemx.ramsey import solve_breakeven
from nemx.scheduler import (
    brute_force_schedule,
    classify_device,
    grid_error_bound,
    optimal_schedule,
    thresholds,
)
from nemx.study import StudyCell, load_scenarios, render_rates, run_study, write_reports_atomic
from nemx.tariff import TariffParams, TouTariff, params_at


def _gammas(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad gamma list {text!r}") from None
    if not vals or any(not 0 <= g <= 1 for g in vals):
        raise argparse.ArgumentTypeError("gammas must be numbers in [0,1]")
    return sorted(vals)


def _flat_params(cfg: StudyConfig, hour: int) -> TariffParams:
    if cfg.tariff is None:
        raise ConfigError("tariff: section is required for this command")
    if isinstance(cfg.tariff, TouTariff):
        return params_at(cfg.tariff, hour)
    return cfg.tariff


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def cmd_schedule(args) -> int:
    cfg = load_config(args.config)
    params = _flat_params(cfg, args.hour)
    r = args.r if args.r is not None else cfg.r
    if r is None:
        raise ConfigError("r: give the renewable output in the config or with --r")
    _emit(optimal_schedule(cfg.devices, params, r).to_dict())
    return 0


def cmd_thresholds(args) -> int:
    cfg = load_config(args.config)
    th = thresholds(cfg.devices, _flat_params(cfg, args.hour))
    _emit({"d_plus": th.d_plus, "d_minus": th.d_minus})
    return 0


def cmd_classify(args) -> int:
    cfg = load_config(args.config)
    params = _flat_params(cfg, args.hour)
    _emit([{"device": d.name, "a": d.a, "class": classify_device(d, params).value}
           for d in cfg.devices])
    return 0


def cmd_rates(args) -> int:
    cfg = load_config(args.config)
    scens = load_scenarios(cfg)
    gammas = args.gamma or cfg.gammas
    cells = [
        StudyCell(solve_breakeven(t, cfg.devices, cfg.cost, scens, g, **cfg.solver.kwargs()), None)
        for t in cfg.policies for g in gammas
    ]
    text = render_rates(cells)
    if args.out:
        write_reports_atomic({"rates.csv": text}, Path(args.out))
    sys.stdout.write(text)
    infeasible = [f"{c.solution.policy}@{c.solution.gamma}" for c in cells if not c.solution.feasible]
    if infeasible:
        raise InfeasibleError("break-even infeasible for " + ", ".join(infeasible))
    return 0


def cmd_study(args) -> int:
    cfg = load_config(args.config)
    out = Path(args.out) if args.out else None
    result = run_study(cfg, out, args.gamma)
    n_bad = sum(not c.solution.feasible for c in result.cells)
    print(f"study: {len(result.cells)} cells ({n_bad} infeasible), "
          f"{len(result.scenarios)} scenarios -> {out or cfg.output_dir}")
    return 0


def cmd_payback(args) -> int:
    pb = None
    if args.config:
        pb = load_config(args.config).payback
    if args.install_cost is not None:
        pb = PaybackParams(args.install_cost, args.degradation or 0.0, args.interest or 0.0,
                           args.horizon or 50)
    if pb is None:
        raise ConfigError("payback: give --install-cost or a config with a payback section")
    res = payback_time(args.saving_per_year, pb)
    _emit({"years": res.years, "never": res.never, "simple_years": res.simple_years})
    return 0


def cmd_verify(args) -> int:
    from nemx.instances import random_instance

    rng = np.random.default_rng(args.seed)
    worst = 0.0
    failures = 0
    for _ in range(args.count):
        devices, params, r = random_instance(rng)
        opt = optimal_schedule(devices, params, r)
        bf = brute_force_schedule(devices, params, r, args.step)
        gap = opt.surplus - bf.surplus
        worst = max(worst, abs(gap))
        if gap < -1e-6 or gap > grid_error_bound(devices, params, args.step) + 1e-9:
            failures += 1
    print(f"verify: backend={kernels.BACKEND} seed={args.seed} instances={args.count} "
          f"step={args.step:g} worst_gap={worst:.3e} failures={failures}")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nemx", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, config_required=True):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", required=config_required, help="study config JSON")
        sp.set_defaults(func=fn)
        return sp

    sp = add("schedule", cmd_schedule, "optimal schedule for one renewable output")
    sp.add_argument("--r", type=float, help="renewable output (kWh), overrides config 'r'")
    sp.add_argument("--hour", type=int, default=0, help="hour for TOU lookup")
    sp = add("thresholds", cmd_thresholds, "net-consumption / net-production thresholds")
    sp.add_argument("--hour", type=int, default=0)
    sp = add("classify", cmd_classify, "device priority classes")
    sp.add_argument("--hour", type=int, default=0)
    sp = add("rates", cmd_rates, "break-even retail rates per policy and gamma")
    sp.add_argument("--gamma", type=_gammas, help="comma-separated adoption fractions")
    sp.add_argument("--out", help="also write rates.csv into this directory")
    sp = add("study", cmd_study, "full study pipeline")
    sp.add_argument("--gamma", type=_gammas)
    sp.add_argument("--out", help="report directory (default: config output_dir)")
    sp = add("payback", cmd_payback, "discounted payback time", config_required=False)
    sp.add_argument("--saving-per-year", type=float, required=True)
    sp.add_argument("--install-cost", type=float)
    sp.add_argument("--degradation", type=float)
    sp.add_argument("--interest", type=float)
    sp.add_argument("--horizon", type=int)
    sp = sub.add_parser("verify", help="check the closed-form scheduler against brute force")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--step", type=float, default=1e-3)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NemError as exc:
        record = {"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
        print(json.dumps(record), file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
