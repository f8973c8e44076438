"""JSON study configuration.

Every value is validated on load and errors name the offending JSON path,
e.g. ``devices[2].b``.  Relative file paths are resolved against the
directory holding the config file.  See README.md for the full schema.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from nemx.devices import DeviceSet, DeviceUtility
from nemx.errors import ConfigError, InvalidParameterError
from nemx.metrics import DEFAULT_HORIZON, PaybackParams
from nemx.ramsey import (
    BREAKEVEN_TOL,
    DEFAULT_BRACKET,
    RETAIL_XTOL,
    SCAN_POINTS,
    PolicyKind,
    PolicyTemplate,
    TouShape,
)
from nemx.tariff import TariffParams, TouTariff
from nemx.welfare import CostModel


@dataclass(frozen=True)
class SolverSettings:
    breakeven_tol: float = BREAKEVEN_TOL
    retail_xtol: float = RETAIL_XTOL
    bracket: tuple[float, float] = DEFAULT_BRACKET
    scan_points: int = SCAN_POINTS

    def kwargs(self) -> dict:
        return dict(bracket=self.bracket, tol=self.breakeven_tol, xtol=self.retail_xtol,
                    scan_points=self.scan_points)


@dataclass(frozen=True)
class StudyConfig:
    devices: DeviceSet
    cost: CostModel = field(default_factory=CostModel)
    policies: tuple[PolicyTemplate, ...] = ()
    gammas: tuple[float, ...] = (0.0,)
    payback: PaybackParams | None = None
    prices_path: Path | None = None
    generation_path: Path | None = None
    resample_hours: int = 1
    output_dir: Path | None = None
    solver: SolverSettings = field(default_factory=SolverSettings)
    tariff: TariffParams | TouTariff | None = None
    r: float | None = None
    days_in_month: float = 30.0

    @property
    def periods_per_day(self) -> int:
        return 24 // self.resample_hours


def _fail(path: str, msg: str) -> ConfigError:
    return ConfigError(f"{path}: {msg}")


def _obj(node: Any, path: str) -> dict:
    if not isinstance(node, dict):
        raise _fail(path, "expected an object")
    return node


def _num(node: dict, key: str, path: str, default: Any = ..., *, lo: float | None = None,
         lo_open: bool = False) -> float:
    if key not in node:
        if default is ...:
            raise _fail(f"{path}.{key}", "missing required number")
        return default
    v = node[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise _fail(f"{path}.{key}", f"expected a finite number, got {v!r}")
    if lo is not None and (v <= lo if lo_open else v < lo):
        raise _fail(f"{path}.{key}", f"must be {'>' if lo_open else '>='} {lo}, got {v}")
    return float(v)


def _int(node: dict, key: str, path: str, default: int) -> int:
    v = node.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int):
        raise _fail(f"{path}.{key}", f"expected an integer, got {v!r}")
    return v


def _wrap(path: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except InvalidParameterError as exc:
        raise _fail(path, str(exc)) from None


def parse_devices(node: Any, path: str = "devices") -> DeviceSet:
    if not isinstance(node, list) or not node:
        raise _fail(path, "expected a non-empty list of devices")
    devs = []
    for i, d in enumerate(node):
        p = f"{path}[{i}]"
        d = _obj(d, p)
        dev = _wrap(p, DeviceUtility, _num(d, "a", p), _num(d, "b", p),
                    _num(d, "d_max", p), str(d.get("name", f"device{i}")))
        _wrap(p, dev.check_monotone)
        devs.append(dev)
    return DeviceSet(devs)


def _params(node: dict, path: str) -> TariffParams:
    return _wrap(path, TariffParams, _num(node, "retail_rate", path),
                 _num(node, "sell_rate", path), _num(node, "fixed_charge", path, 0.0))


def parse_tariff(node: Any, path: str = "tariff") -> TariffParams | TouTariff:
    node = _obj(node, path)
    if "periods" not in node:
        return _params(node, path)
    periods = node["periods"]
    if not isinstance(periods, list) or not periods:
        raise _fail(f"{path}.periods", "expected a non-empty list")
    ranges = []
    for i, pn in enumerate(periods):
        p = f"{path}.periods[{i}]"
        pn = _obj(pn, p)
        ranges.append((_int(pn, "start", p, -1), _int(pn, "end", p, -1), _params(pn, p)))
    return _wrap(f"{path}.periods", TouTariff.from_ranges, ranges)


def parse_cost(node: Any, periods_per_day: int, path: str = "cost") -> CostModel:
    node = _obj(node, path)
    if "fixed_cost_per_period" in node:
        theta = _num(node, "fixed_cost_per_period", path, lo=0)
    else:
        theta = _num(node, "fixed_cost_per_day", path, 0.0, lo=0) / periods_per_day
    return _wrap(path, CostModel, theta, _num(node, "smc_adder", path, 0.030, lo=0),
                 _num(node, "env_price", path, 0.0, lo=0))


def parse_policy(node: Any, path: str, periods_per_day: int, days_in_month: float) -> PolicyTemplate:
    node = _obj(node, path)
    try:
        kind = PolicyKind(node.get("kind"))
    except ValueError:
        choices = ", ".join(k.value for k in PolicyKind)
        raise _fail(f"{path}.kind", f"expected one of {choices}, got {node.get('kind')!r}") from None
    tou = None
    if node.get("tou") is not None:
        t = _obj(node["tou"], f"{path}.tou")
        tou = _wrap(f"{path}.tou", TouShape, _int(t, "peak_start", f"{path}.tou", 16),
                    _int(t, "peak_end", f"{path}.tou", 21),
                    _num(t, "peak_ratio", f"{path}.tou", 1.5))
    return _wrap(
        path, PolicyTemplate,
        name=str(node.get("name", kind.value)),
        kind=kind,
        sell_offset=_num(node, "sell_offset", path, 0.0, lo=0),
        fixed_charge=_num(node, "fixed_charge", path, 0.0),
        cbc_rate=_num(node, "cbc_rate", path, 0.0, lo=0),
        pv_kw=_num(node, "pv_kw", path, 0.0, lo=0),
        tou=tou,
        days_in_month=days_in_month,
        periods_per_day=periods_per_day,
    )


def parse_payback(node: Any, path: str = "payback") -> PaybackParams:
    node = _obj(node, path)
    if "install_cost" in node:
        cost = _num(node, "install_cost", path, lo=0, lo_open=True)
    else:
        cost = _num(node, "install_cost_per_kw", path, lo=0, lo_open=True) * _num(
            node, "pv_kw", path, lo=0, lo_open=True)
    return _wrap(path, PaybackParams, cost, _num(node, "degradation", path, 0.0),
                 _num(node, "interest", path, 0.0), _int(node, "horizon_years", path, DEFAULT_HORIZON))


def parse_gammas(node: Any, path: str = "gammas") -> tuple[float, ...]:
    if not isinstance(node, list) or not node:
        raise _fail(path, "expected a non-empty list")
    out = []
    for i, g in enumerate(node):
        if isinstance(g, bool) or not isinstance(g, (int, float)) or not 0 <= g <= 1:
            raise _fail(f"{path}[{i}]", f"expected a number in [0,1], got {g!r}")
        out.append(float(g))
    if any(a > b for a, b in zip(out, out[1:])):
        raise _fail(path, "must be ascending")
    return tuple(out)


def parse_config(doc: Any, base_dir: Path = Path(".")) -> StudyConfig:
    doc = _obj(doc, "$")
    if "devices" not in doc:
        raise _fail("devices", "missing")
    devices = parse_devices(doc["devices"])

    data = _obj(doc.get("data", {}), "data")
    resample = _int(data, "resample_hours", "data", 1)
    if resample < 1 or 24 % resample:
        raise _fail("data.resample_hours", f"must divide 24, got {resample}")
    periods_per_day = 24 // resample

    def _path(key: str) -> Path | None:
        if key not in data:
            return None
        p = (base_dir / str(data[key])).resolve()
        if not p.is_file():
            raise _fail(f"data.{key}", f"file not found: {p}")
        return p

    billing = _obj(doc.get("billing", {}), "billing")
    days_in_month = _num(billing, "days_in_month", "billing", 30.0, lo=0, lo_open=True)
    cost = parse_cost(doc.get("cost", {}), periods_per_day)
    policies = tuple(
        parse_policy(p, f"policies[{i}]", periods_per_day, days_in_month)
        for i, p in enumerate(doc.get("policies", []))
    )
    names = [p.name for p in policies]
    if len(set(names)) != len(names):
        raise _fail("policies", "policy names must be unique")

    sv = _obj(doc.get("solver", {}), "solver")
    bracket = sv.get("bracket", list(DEFAULT_BRACKET))
    if (not isinstance(bracket, list) or len(bracket) != 2
            or not all(isinstance(x, (int, float)) for x in bracket)
            or not 0 < bracket[0] < bracket[1]):
        raise _fail("solver.bracket", f"expected [lo, hi] with 0 < lo < hi, got {bracket!r}")
    solver = SolverSettings(
        breakeven_tol=_num(sv, "breakeven_tol", "solver", BREAKEVEN_TOL, lo=0, lo_open=True),
        retail_xtol=_num(sv, "retail_xtol", "solver", RETAIL_XTOL, lo=0, lo_open=True),
        bracket=(float(bracket[0]), float(bracket[1])),
        scan_points=_int(sv, "scan_points", "solver", SCAN_POINTS),
    )
    if solver.scan_points < 2:
        raise _fail("solver.scan_points", "must be >= 2")

    r = None
    if "r" in doc:
        r = _num(doc, "r", "$", lo=0)
    out = doc.get("output_dir")
    return StudyConfig(
        devices=devices,
        cost=cost,
        policies=policies,
        gammas=parse_gammas(doc["gammas"]) if "gammas" in doc else (0.0,),
        payback=parse_payback(doc["payback"]) if "payback" in doc else None,
        prices_path=_path("prices"),
        generation_path=_path("generation"),
        resample_hours=resample,
        output_dir=(base_dir / out).resolve() if out else None,
        solver=solver,
        tariff=parse_tariff(doc["tariff"]) if "tariff" in doc else None,
        r=r,
        days_in_month=days_in_month,
    )


def load_config(path: str | Path) -> StudyConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from None
    return parse_config(doc, path.parent)
