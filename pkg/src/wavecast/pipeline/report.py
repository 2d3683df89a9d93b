"""Forecast comparison reports: assembly, file emission, reading back.

A report holds per-scenario, per-horizon accuracy metrics plus every pairwise
relative-improvement figure. Improvements are always recomputed from the
metric values at emission time, so a report on disk can never carry a stale or
hand-edited improvement cell. Emission produces four artifacts:

    report.json              complete machine-readable document
    report_metrics.csv       scenario x horizon metric values (full precision)
    report_improvements.csv  pairwise improvements (full precision)
    report.txt               human-readable tables (improvements at 2 decimals)

No artifact embeds a timestamp, so identical runs emit identical bytes.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from ..series import NonPositiveBaseline, improvement_pct

__all__ = [
    "IoError",
    "ScenarioMetrics",
    "ImprovementRow",
    "ForecastReport",
    "build_report",
    "compute_improvements",
    "emit_report",
    "read_report",
    "read_metrics_csv",
]

_METRIC_NAMES = ("mape", "rmse", "rmsre")
_FORMAT_NAME = "wavecast-report"
_FORMAT_VERSION = 1


class IoError(RuntimeError):
    """A report artifact could not be written or read."""


@dataclass(frozen=True)
class ScenarioMetrics:
    """One scenario's held-out accuracy figures."""

    label: str
    horizons: tuple[int, ...]
    metrics: Mapping[int, Mapping[str, float]]
    forecasts: Mapping[int, tuple[float, ...]] = field(default_factory=dict)
    test_periods: tuple[str, ...] = ()
    flags: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for horizon in self.horizons:
            row = self.metrics.get(horizon)
            if row is None:
                raise ValueError(f"scenario {self.label!r} lacks metrics for horizon {horizon}")
            for name in _METRIC_NAMES:
                if name not in row:
                    raise ValueError(f"metrics for horizon {horizon} lack {name!r}")


@dataclass(frozen=True)
class ImprovementRow:
    """Relative improvement of `candidate` over `baseline` on one metric."""

    metric: str
    horizon: int
    baseline: str
    candidate: str
    baseline_value: float
    candidate_value: float
    improvement_pct: float


@dataclass(frozen=True)
class ForecastReport:
    """Scenario metrics plus derived pairwise improvements and run metadata."""

    scenarios: tuple[ScenarioMetrics, ...]
    improvements: tuple[ImprovementRow, ...]
    metadata: Mapping[str, Any] = field(default_factory=dict)


def compute_improvements(
    scenarios: tuple[ScenarioMetrics, ...]
) -> tuple[ImprovementRow, ...]:
    """All ordered scenario pairs, per metric and horizon.

    The improvement of candidate A over baseline B is (B - A) / B * 100.
    Pairs whose baseline value is not strictly positive are skipped (the
    relative improvement is undefined there).
    """
    rows: list[ImprovementRow] = []
    for metric in _METRIC_NAMES:
        for baseline in scenarios:
            for candidate in scenarios:
                if baseline.label == candidate.label:
                    continue
                shared = [h for h in baseline.horizons if h in candidate.horizons]
                for horizon in shared:
                    value_b = float(baseline.metrics[horizon][metric])
                    value_a = float(candidate.metrics[horizon][metric])
                    try:
                        pct = improvement_pct(value_b, value_a)
                    except NonPositiveBaseline:
                        continue
                    rows.append(
                        ImprovementRow(
                            metric=metric,
                            horizon=horizon,
                            baseline=baseline.label,
                            candidate=candidate.label,
                            baseline_value=value_b,
                            candidate_value=value_a,
                            improvement_pct=pct,
                        )
                    )
    return tuple(rows)


def build_report(
    scenarios: list[ScenarioMetrics] | tuple[ScenarioMetrics, ...],
    metadata: Mapping[str, Any] | None = None,
) -> ForecastReport:
    """Assemble a report; improvement rows are derived, never passed in."""
    ordered = tuple(sorted(scenarios, key=lambda s: s.label))
    labels = [s.label for s in ordered]
    if len(set(labels)) != len(labels):
        raise ValueError("scenario labels must be unique")
    return ForecastReport(
        scenarios=ordered,
        improvements=compute_improvements(ordered),
        metadata=dict(metadata or {}),
    )


def _report_document(report: ForecastReport) -> dict[str, Any]:
    return {
        "format": _FORMAT_NAME,
        "version": _FORMAT_VERSION,
        "metadata": dict(report.metadata),
        "scenarios": [
            {
                "label": s.label,
                "flags": dict(s.flags),
                "test_periods": list(s.test_periods),
                "results": [
                    {
                        "horizon": h,
                        **{name: float(s.metrics[h][name]) for name in _METRIC_NAMES},
                        "forecasts": [float(v) for v in s.forecasts.get(h, ())],
                    }
                    for h in s.horizons
                ],
            }
            for s in report.scenarios
        ],
        "improvements": [
            {
                "metric": r.metric,
                "horizon": r.horizon,
                "baseline": r.baseline,
                "candidate": r.candidate,
                "baseline_value": r.baseline_value,
                "candidate_value": r.candidate_value,
                "improvement_pct": r.improvement_pct,
            }
            for r in report.improvements
        ],
    }


def _text_table(report: ForecastReport) -> str:
    lines: list[str] = ["FORECAST REPORT", "=" * 15, ""]
    for key in sorted(report.metadata):
        lines.append(f"{key}: {report.metadata[key]}")
    if report.metadata:
        lines.append("")
    header = f"{'scenario':<20} {'horizon':>7} {'MAPE %':>12} {'RMSE':>14} {'RMSRE':>12}"
    lines += ["Held-out accuracy", "-" * len(header), header, "-" * len(header)]
    for s in report.scenarios:
        for h in s.horizons:
            row = s.metrics[h]
            lines.append(
                f"{s.label:<20} {h:>7d} {row['mape']:>12.4f} "
                f"{row['rmse']:>14.4f} {row['rmsre']:>12.6f}"
            )
    lines.append("")
    if report.improvements:
        header = (
            f"{'metric':<7} {'horizon':>7} {'baseline':<20} {'candidate':<20} "
            f"{'improvement %':>14}"
        )
        lines += ["Pairwise improvements", "-" * len(header), header, "-" * len(header)]
        for r in report.improvements:
            lines.append(
                f"{r.metric:<7} {r.horizon:>7d} {r.baseline:<20} {r.candidate:<20} "
                f"{r.improvement_pct:>14.2f}"
            )
        lines.append("")
    return "\n".join(lines)


def emit_report(report: ForecastReport, out_dir: str | Path, basename: str = "report") -> dict[str, Path]:
    """Write the four artifacts; improvements are recomputed here.

    Returns the mapping of artifact kind to path. Raises IoError when any file
    cannot be written.
    """
    refreshed = ForecastReport(
        scenarios=report.scenarios,
        improvements=compute_improvements(report.scenarios),
        metadata=report.metadata,
    )
    out = Path(out_dir)
    paths = {
        "json": out / f"{basename}.json",
        "metrics_csv": out / f"{basename}_metrics.csv",
        "improvements_csv": out / f"{basename}_improvements.csv",
        "text": out / f"{basename}.txt",
    }
    try:
        out.mkdir(parents=True, exist_ok=True)
        paths["json"].write_text(
            json.dumps(_report_document(refreshed), sort_keys=True, indent=2) + "\n",
            encoding="utf-8",
        )
        with paths["metrics_csv"].open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["scenario", "horizon", *_METRIC_NAMES])
            for s in refreshed.scenarios:
                for h in s.horizons:
                    writer.writerow(
                        [s.label, h, *[repr(float(s.metrics[h][m])) for m in _METRIC_NAMES]]
                    )
        with paths["improvements_csv"].open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(
                [
                    "metric",
                    "horizon",
                    "baseline",
                    "candidate",
                    "baseline_value",
                    "candidate_value",
                    "improvement_pct",
                ]
            )
            for r in refreshed.improvements:
                writer.writerow(
                    [
                        r.metric,
                        r.horizon,
                        r.baseline,
                        r.candidate,
                        repr(float(r.baseline_value)),
                        repr(float(r.candidate_value)),
                        repr(float(r.improvement_pct)),
                    ]
                )
        paths["text"].write_text(_text_table(refreshed), encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write report artifacts under {out}: {exc}") from exc
    return paths


def read_report(path: str | Path) -> ForecastReport:
    """Read a report.json document back into a ForecastReport."""
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise IoError(f"cannot read report {path}: {exc}") from exc
    if not isinstance(document, dict) or document.get("format") != _FORMAT_NAME:
        raise IoError(f"{path} is not a {_FORMAT_NAME} document")
    if document.get("version") != _FORMAT_VERSION:
        raise IoError(f"unsupported report version {document.get('version')!r}")
    scenarios = []
    for entry in document.get("scenarios", []):
        horizons = tuple(int(r["horizon"]) for r in entry["results"])
        scenarios.append(
            ScenarioMetrics(
                label=str(entry["label"]),
                horizons=horizons,
                metrics={
                    int(r["horizon"]): {m: float(r[m]) for m in _METRIC_NAMES}
                    for r in entry["results"]
                },
                forecasts={
                    int(r["horizon"]): tuple(float(v) for v in r.get("forecasts", []))
                    for r in entry["results"]
                },
                test_periods=tuple(entry.get("test_periods", ())),
                flags=dict(entry.get("flags", {})),
            )
        )
    return ForecastReport(
        scenarios=tuple(scenarios),
        improvements=compute_improvements(tuple(scenarios)),
        metadata=dict(document.get("metadata", {})),
    )


def read_metrics_csv(path: str | Path) -> dict[tuple[str, int], dict[str, float]]:
    """Read the metrics CSV back as {(scenario, horizon): {metric: value}}."""
    out: dict[tuple[str, int], dict[str, float]] = {}
    try:
        with Path(path).open(newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            for row in reader:
                key = (row["scenario"], int(row["horizon"]))
                out[key] = {m: float(row[m]) for m in _METRIC_NAMES}
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise IoError(f"cannot read metrics CSV {path}: {exc}") from exc
    return out
