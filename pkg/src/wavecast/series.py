"""Time-series container, min-max scaling, splitting, and forecast accuracy metrics."""

from __future__ import annotations

import csv
import datetime
import math
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Frequency",
    "TimeSeries",
    "NormalizationParams",
    "ForecastEvaluation",
    "SplitSpec",
    "DegenerateSeries",
    "ZeroObserved",
    "LengthMismatch",
    "NonPositiveBaseline",
    "InvalidSplit",
    "ParseError",
    "parse_period",
    "format_period",
    "add_periods",
    "period_range",
    "normalize",
    "denormalize",
    "apply_normalization",
    "invert_normalization",
    "evaluate",
    "improvement_pct",
    "split",
    "default_split",
    "read_series_csv",
    "write_series_csv",
]


class DegenerateSeries(ValueError):
    """Constant input makes min-max scaling divide by zero."""


class ZeroObserved(ValueError):
    """A zero observed value makes relative errors undefined."""


class LengthMismatch(ValueError):
    """Paired sequences differ in length."""


class NonPositiveBaseline(ValueError):
    """The baseline metric of an improvement ratio must be positive."""


class InvalidSplit(ValueError):
    """A train/test split does not fit the series."""


class ParseError(ValueError):
    """A delimited input file violates its documented format."""


class Frequency(str, Enum):
    MONTHLY = "monthly"
    WEEKLY = "weekly"


_MONTHLY_RE = re.compile(r"^(\d{4})-(\d{2})$")
_WEEKLY_RE = re.compile(r"^(\d{4})-W(\d{2})$")


def parse_period(label: str) -> tuple[tuple[int, int], Frequency]:
    """Parse a 'YYYY-MM' or 'YYYY-Wnn' label into ((year, index), frequency)."""
    match = _MONTHLY_RE.match(label)
    if match:
        year, month = int(match.group(1)), int(match.group(2))
        if not 1 <= month <= 12:
            raise ParseError(f"month out of range in period {label!r}")
        return (year, month), Frequency.MONTHLY
    match = _WEEKLY_RE.match(label)
    if match:
        year, week = int(match.group(1)), int(match.group(2))
        try:
            datetime.date.fromisocalendar(year, week, 1)
        except ValueError as exc:
            raise ParseError(f"invalid ISO week in period {label!r}") from exc
        return (year, week), Frequency.WEEKLY
    raise ParseError(f"period {label!r} matches neither YYYY-MM nor YYYY-Wnn")


def format_period(period: tuple[int, int], frequency: Frequency) -> str:
    """Render (year, index) as 'YYYY-MM' or 'YYYY-Wnn'."""
    year, index = period
    if Frequency(frequency) is Frequency.MONTHLY:
        return f"{year:04d}-{index:02d}"
    return f"{year:04d}-W{index:02d}"


def _validate_period(period: tuple[int, int], frequency: Frequency) -> None:
    year, index = period
    if Frequency(frequency) is Frequency.MONTHLY:
        if not 1 <= index <= 12:
            raise ValueError(f"month {index} out of range")
    else:
        # fromisocalendar rejects week numbers the ISO year does not have
        datetime.date.fromisocalendar(year, index, 1)


def add_periods(period: tuple[int, int], steps: int, frequency: Frequency) -> tuple[int, int]:
    """Advance (year, index) by a signed number of periods."""
    year, index = period
    if Frequency(frequency) is Frequency.MONTHLY:
        month0 = (index - 1) + steps
        return year + month0 // 12, month0 % 12 + 1
    day = datetime.date.fromisocalendar(year, index, 1) + datetime.timedelta(weeks=steps)
    iso = day.isocalendar()
    return iso[0], iso[1]


def period_range(start: tuple[int, int], count: int, frequency: Frequency) -> list[tuple[int, int]]:
    """List `count` consecutive periods starting at `start`."""
    return [add_periods(start, k, frequency) for k in range(count)]


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled series of finite reals with calendar-period metadata."""

    name: str
    start_period: tuple[int, int]
    frequency: Frequency
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if values.size < 2:
            raise ValueError("a series needs at least two values")
        if not np.all(np.isfinite(values)):
            raise ValueError("series values must all be finite")
        frequency = Frequency(self.frequency)
        _validate_period(tuple(self.start_period), frequency)
        values.flags.writeable = False
        object.__setattr__(self, "start_period", tuple(self.start_period))
        object.__setattr__(self, "frequency", frequency)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def periods(self) -> list[tuple[int, int]]:
        return period_range(self.start_period, len(self), self.frequency)

    @property
    def labels(self) -> list[str]:
        return [format_period(p, self.frequency) for p in self.periods]

    def with_values(self, values: Iterable[float], name: str | None = None) -> "TimeSeries":
        """Copy of this series with replaced values (same start and frequency)."""
        return TimeSeries(name or self.name, self.start_period, self.frequency, np.asarray(values))


@dataclass(frozen=True)
class NormalizationParams:
    """Min-max scaling parameters: raw extrema and the target interval."""

    x_min: float
    x_max: float
    x_low: float
    x_high: float

    def __post_init__(self) -> None:
        if not self.x_min < self.x_max:
            raise ValueError("x_min must be strictly below x_max")
        if not self.x_low < self.x_high:
            raise ValueError("x_low must be strictly below x_high")


@dataclass(frozen=True)
class ForecastEvaluation:
    """Observed/predicted pairs with the three accuracy metrics."""

    observed: tuple[float, ...]
    predicted: tuple[float, ...]
    n: int
    mape: float
    rmse: float
    rmsre: float


@dataclass(frozen=True)
class SplitSpec:
    """Count of trailing points held out as the test set."""

    test_length: int

    def __post_init__(self) -> None:
        if self.test_length < 1:
            raise InvalidSplit("test_length must be at least 1")


def apply_normalization(values: np.ndarray, params: NormalizationParams) -> np.ndarray:
    """Map raw values onto the target interval with the stored extrema."""
    values = np.asarray(values, dtype=np.float64)
    scale = (params.x_high - params.x_low) / (params.x_max - params.x_min)
    return (values - params.x_min) * scale + params.x_low


def invert_normalization(values: np.ndarray, params: NormalizationParams) -> np.ndarray:
    """Inverse of apply_normalization."""
    values = np.asarray(values, dtype=np.float64)
    scale = (params.x_max - params.x_min) / (params.x_high - params.x_low)
    return (values - params.x_low) * scale + params.x_min


def normalize(
    series: TimeSeries, target_low: float = 0.0, target_high: float = 1.0
) -> tuple[TimeSeries, NormalizationParams]:
    """Min-max scale a series onto [target_low, target_high]."""
    if not target_low < target_high:
        raise ValueError("target_low must be strictly below target_high")
    x_min = float(series.values.min())
    x_max = float(series.values.max())
    if x_min == x_max:
        raise DegenerateSeries("all values equal; min-max scaling is undefined")
    params = NormalizationParams(x_min, x_max, float(target_low), float(target_high))
    return series.with_values(apply_normalization(series.values, params)), params


def denormalize(series: TimeSeries, params: NormalizationParams) -> TimeSeries:
    """Invert a prior normalize call elementwise."""
    return series.with_values(invert_normalization(series.values, params))


def evaluate(observed: Sequence[float], predicted: Sequence[float]) -> ForecastEvaluation:
    """Compute MAPE (percent), RMSE (series units), and RMSRE (ratio)."""
    y = np.asarray(observed, dtype=np.float64)
    y_hat = np.asarray(predicted, dtype=np.float64)
    if y.ndim != 1 or y_hat.ndim != 1 or y.shape != y_hat.shape:
        raise LengthMismatch(f"observed has shape {y.shape}, predicted {y_hat.shape}")
    if y.size < 1:
        raise LengthMismatch("at least one observed/predicted pair is required")
    if np.any(y == 0.0):
        raise ZeroObserved("zero observed value; relative errors are undefined")
    err = y - y_hat
    rel = err / y
    return ForecastEvaluation(
        observed=tuple(float(v) for v in y),
        predicted=tuple(float(v) for v in y_hat),
        n=int(y.size),
        mape=float(np.mean(np.abs(rel)) * 100.0),
        rmse=float(np.sqrt(np.mean(err**2))),
        rmsre=float(np.sqrt(np.mean(rel**2))),
    )


def improvement_pct(metric_b: float, metric_a: float) -> float:
    """Relative improvement of metric A over baseline B, in percent."""
    if metric_b <= 0.0:
        raise NonPositiveBaseline(f"baseline metric must be positive, got {metric_b}")
    return (metric_b - metric_a) / metric_b * 100.0


def split(series: TimeSeries, spec: SplitSpec) -> tuple[TimeSeries, TimeSeries]:
    """Cut a series into contiguous (train, test) with the trailing test held out."""
    n = len(series)
    if spec.test_length > n - 2:
        raise InvalidSplit(f"test_length {spec.test_length} leaves under two training points of {n}")
    if spec.test_length < 2:
        # a one-point piece would not be a valid series
        raise InvalidSplit("test_length below 2 produces a degenerate test series")
    cut = n - spec.test_length
    train = TimeSeries(series.name, series.start_period, series.frequency, series.values[:cut])
    test_start = add_periods(series.start_period, cut, series.frequency)
    test = TimeSeries(series.name, test_start, series.frequency, series.values[cut:])
    return train, test


def default_split(series_length: int) -> SplitSpec:
    """Trailing 20 percent of the series, rounded up."""
    return SplitSpec(math.ceil(0.2 * series_length))


def read_series_csv(path: str | Path, name: str | None = None) -> TimeSeries:
    """Read a `period,value` CSV, rejecting gaps, duplicates, and disorder."""
    path = Path(path)
    with open(path, newline="") as handle:
        rows = list(csv.reader(handle))
    if not rows or rows[0] != ["period", "value"]:
        raise ParseError(f"{path}: expected header 'period,value'")
    body = [row for row in rows[1:] if row]
    if len(body) < 2:
        raise ParseError(f"{path}: a series needs at least two rows")
    start, frequency = parse_period(body[0][0])
    values = []
    for offset, row in enumerate(body):
        if len(row) != 2:
            raise ParseError(f"{path}: row {offset + 2} does not have two fields")
        period, freq_here = parse_period(row[0])
        if freq_here is not frequency:
            raise ParseError(f"{path}: row {offset + 2} mixes period frequencies")
        expected = add_periods(start, offset, frequency)
        if period != expected:
            raise ParseError(
                f"{path}: row {offset + 2} has period {row[0]}, expected "
                f"{format_period(expected, frequency)} (gap, duplicate, or disorder)"
            )
        try:
            value = float(row[1])
        except ValueError as exc:
            raise ParseError(f"{path}: row {offset + 2} has non-numeric value {row[1]!r}") from exc
        if not math.isfinite(value):
            raise ParseError(f"{path}: row {offset + 2} has non-finite value")
        values.append(value)
    return TimeSeries(name or path.stem, start, frequency, np.asarray(values))


def write_series_csv(series: TimeSeries, path: str | Path) -> None:
    """Write a series as a `period,value` CSV with full float precision."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["period", "value"])
        for label, value in zip(series.labels, series.values):
            writer.writerow([label, repr(float(value))])
