"""Loading and saving the pipeline's input bundle.

A bundle is the target series plus, optionally, a period-aligned feature table
(CSV with a ``period`` column followed by ``platform.feature`` columns), a
contributors sidecar (JSON mapping column name to node-id list), and a social
graph given as two CSVs: nodes (``id,goodwill,power,uprightness,valence``) and
directed edges (``source,target,interaction_count``).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..leaders import NodeAttributes, SocialGraph
from ..series import (
    Frequency,
    ParseError,
    TimeSeries,
    add_periods,
    format_period,
    read_series_csv,
)
from .features import FeatureTable

__all__ = [
    "AlignmentError",
    "Bundle",
    "load_bundle",
    "read_feature_csv",
    "write_feature_csv",
    "read_graph_csv",
    "write_graph_csv",
    "resample_to_monthly",
]


class AlignmentError(ValueError):
    """Feature periods and series periods disagree."""


@dataclass(frozen=True)
class Bundle:
    """Everything one pipeline run consumes."""

    series: TimeSeries
    features: FeatureTable | None = None
    graph: SocialGraph | None = None


def read_feature_csv(
    path: str | Path, contributors_path: str | Path | None = None
) -> FeatureTable:
    """Read a feature table; first header cell must be ``period``."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path} is empty") from None
        if not header or header[0] != "period" or len(header) < 2:
            raise ParseError(
                f"{path} must start with a 'period' column followed by feature columns"
            )
        columns = tuple(header[1:])
        periods: list[str] = []
        rows: list[list[float]] = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"{path}:{line_no}: expected {len(header)} cells, got {len(row)}")
            periods.append(row[0])
            try:
                rows.append([float(cell) for cell in row[1:]])
            except ValueError as exc:
                raise ParseError(f"{path}:{line_no}: {exc}") from None
    contributors = None
    if contributors_path is not None:
        raw = json.loads(Path(contributors_path).read_text(encoding="utf-8"))
        if not isinstance(raw, dict):
            raise ParseError(f"{contributors_path} must hold a JSON object")
        contributors = {str(k): tuple(str(n) for n in v) for k, v in raw.items()}
    try:
        return FeatureTable(
            periods=tuple(periods),
            columns=columns,
            values=np.array(rows, dtype=np.float64),
            contributors=contributors,
        )
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def write_feature_csv(
    table: FeatureTable, path: str | Path, contributors_path: str | Path | None = None
) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["period", *table.columns])
        for i, period in enumerate(table.periods):
            writer.writerow([period, *[repr(float(v)) for v in table.values[i]]])
    if contributors_path is not None:
        payload = {} if table.contributors is None else {
            k: list(v) for k, v in table.contributors.items()
        }
        Path(contributors_path).write_text(
            json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )


def read_graph_csv(nodes_path: str | Path, edges_path: str | Path) -> SocialGraph:
    """Build a social graph from node and directed-edge CSVs."""
    nodes_path, edges_path = Path(nodes_path), Path(edges_path)
    attributes: dict[str, NodeAttributes] = {}
    with nodes_path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        expected = ["id", "goodwill", "power", "uprightness", "valence"]
        if reader.fieldnames != expected:
            raise ParseError(f"{nodes_path} header must be {','.join(expected)}")
        for line_no, row in enumerate(reader, start=2):
            try:
                attributes[row["id"]] = NodeAttributes(
                    goodwill=float(row["goodwill"]),
                    power=float(row["power"]),
                    uprightness=float(row["uprightness"]),
                    valence=float(row["valence"]),
                )
            except (TypeError, ValueError) as exc:
                raise ParseError(f"{nodes_path}:{line_no}: {exc}") from None
    edges: list[tuple[str, str, int]] = []
    with edges_path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        expected = ["source", "target", "interaction_count"]
        if reader.fieldnames != expected:
            raise ParseError(f"{edges_path} header must be {','.join(expected)}")
        for line_no, row in enumerate(reader, start=2):
            try:
                edges.append((row["source"], row["target"], int(row["interaction_count"])))
            except (TypeError, ValueError) as exc:
                raise ParseError(f"{edges_path}:{line_no}: {exc}") from None
    try:
        return SocialGraph.from_edges(attributes, edges)
    except ValueError as exc:
        raise ParseError(f"{edges_path}: {exc}") from exc


def write_graph_csv(
    graph: SocialGraph, nodes_path: str | Path, edges_path: str | Path
) -> None:
    with Path(nodes_path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["id", "goodwill", "power", "uprightness", "valence"])
        for node_id in graph.node_ids:
            attr = graph.attributes[node_id]
            writer.writerow(
                [
                    node_id,
                    repr(float(attr.goodwill)),
                    repr(float(attr.power)),
                    repr(float(attr.uprightness)),
                    repr(float(attr.valence)),
                ]
            )
    with Path(edges_path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["source", "target", "interaction_count"])
        for i, source in enumerate(graph.node_ids):
            for j, target in enumerate(graph.node_ids):
                count = int(graph.counts[i, j])
                if count > 0:
                    writer.writerow([source, target, count])


def load_bundle(
    series_path: str | Path,
    features_path: str | Path | None = None,
    contributors_path: str | Path | None = None,
    nodes_path: str | Path | None = None,
    edges_path: str | Path | None = None,
) -> Bundle:
    """Load and cross-validate the pipeline inputs.

    Raises ParseError for malformed files and AlignmentError, naming the first
    offending period, when features and series do not cover identical periods.
    """
    series = read_series_csv(series_path)
    features = None
    if features_path is not None:
        features = read_feature_csv(features_path, contributors_path)
        series_labels = series.labels
        feature_labels = list(features.periods)
        if feature_labels != series_labels:
            extra = [p for p in feature_labels if p not in set(series_labels)]
            missing = [p for p in series_labels if p not in set(feature_labels)]
            if extra:
                raise AlignmentError(
                    f"feature period {extra[0]!r} does not appear in the series"
                )
            if missing:
                raise AlignmentError(
                    f"series period {missing[0]!r} is missing from the features"
                )
            first = next(
                p for p, q in zip(feature_labels, series_labels) if p != q
            )
            raise AlignmentError(f"feature periods out of order near {first!r}")
    elif contributors_path is not None:
        raise ValueError("contributors sidecar given without a feature table")
    graph = None
    if nodes_path is not None or edges_path is not None:
        if nodes_path is None or edges_path is None:
            raise ValueError("graph input needs both a nodes and an edges file")
        graph = read_graph_csv(nodes_path, edges_path)
    return Bundle(series=series, features=features, graph=graph)


def resample_to_monthly(series: TimeSeries, name: str | None = None) -> TimeSeries:
    """Average a weekly series into calendar months.

    Each ISO week is assigned to the month containing its Monday; months are
    averaged over their weeks and must form a gap-free run.
    """
    if series.frequency is Frequency.MONTHLY:
        return series
    import datetime

    buckets: dict[tuple[int, int], list[float]] = {}
    for (year, week), value in zip(series.periods, series.values):
        monday = datetime.date.fromisocalendar(year, week, 1)
        buckets.setdefault((monday.year, monday.month), []).append(float(value))
    months = sorted(buckets)
    for a, b in zip(months, months[1:]):
        if add_periods(a, 1, Frequency.MONTHLY) != b:
            raise ParseError(
                f"resampling produced a gap between "
                f"{format_period(a, Frequency.MONTHLY)} and {format_period(b, Frequency.MONTHLY)}"
            )
    values = [float(np.mean(buckets[m])) for m in months]
    return TimeSeries(
        name or series.name, months[0], Frequency.MONTHLY, np.asarray(values)
    )
