"""Time-series ingestion and scenario construction.

Inputs are CSV files with the header ``timestamp,value``: wholesale prices
in $/kWh or BTM generation in kWh per interval.  Scenarios are formed by
bucketing both series into fixed-length hour buckets (mean price, summed
generation) and inner-joining on the bucket start.
"""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from nemx.errors import DataError
from nemx.welfare import ScenarioSet

HEADER = ["timestamp", "value"]
KINDS = ("price", "generation")


@dataclass(frozen=True)
class TimeSeriesRow:
    timestamp: str
    value: float
    time: datetime


def _parse_time(text: str) -> datetime:
    text = text.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    return datetime.fromisoformat(text)


def load_timeseries(path: str | Path, kind: str) -> list[TimeSeriesRow]:
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    path = Path(path)
    try:
        fh = path.open(newline="")
    except OSError as exc:
        raise DataError(f"{path}: cannot open ({exc.strerror})") from exc
    rows: list[TimeSeriesRow] = []
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path}: empty file")
        if [h.strip() for h in header] != HEADER:
            raise DataError(f"{path}:1: expected header 'timestamp,value', got {','.join(header)!r}")
        for line_no, rec in enumerate(reader, start=2):
            if not rec or all(not f.strip() for f in rec):
                continue
            if len(rec) != 2:
                raise DataError(f"{path}:{line_no}: expected 2 fields, got {len(rec)}")
            try:
                t = _parse_time(rec[0])
            except ValueError:
                raise DataError(f"{path}:{line_no}: bad timestamp {rec[0]!r}") from None
            try:
                v = float(rec[1])
            except ValueError:
                raise DataError(f"{path}:{line_no}: bad value {rec[1]!r}") from None
            if not math.isfinite(v):
                raise DataError(f"{path}:{line_no}: value must be finite")
            if kind == "generation" and v < 0:
                raise DataError(f"{path}:{line_no}: negative generation {v}")
            if rows and t <= rows[-1].time:
                raise DataError(f"{path}:{line_no}: timestamps must be strictly increasing")
            rows.append(TimeSeriesRow(rec[0].strip(), v, t))
    if not rows:
        raise DataError(f"{path}: no data rows")
    return rows


def _bucket(t: datetime, hours: int) -> datetime:
    return t.replace(hour=t.hour - t.hour % hours, minute=0, second=0, microsecond=0)


def build_scenarios(
    prices: list[TimeSeriesRow], generation: list[TimeSeriesRow], resample_hours: int = 1
) -> ScenarioSet:
    if resample_hours < 1 or 24 % resample_hours:
        raise DataError(f"resample_hours must divide 24, got {resample_hours}")
    price_buckets: dict[datetime, list[float]] = defaultdict(list)
    for row in prices:
        price_buckets[_bucket(row.time, resample_hours)].append(row.value)
    gen_buckets: dict[datetime, list[float]] = defaultdict(list)
    for row in generation:
        gen_buckets[_bucket(row.time, resample_hours)].append(row.value)
    try:
        keys = sorted(price_buckets.keys() & gen_buckets.keys())
    except TypeError:
        raise DataError("cannot mix timezone-aware and naive timestamps") from None
    if not keys:
        raise DataError("price and generation series do not overlap")
    return ScenarioSet.equal_weights(
        (math.fsum(gen_buckets[k]), math.fsum(price_buckets[k]) / len(price_buckets[k]), k.hour)
        for k in keys
    )
