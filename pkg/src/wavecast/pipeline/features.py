"""Per-period social-platform feature tables and leader reweighting.

Columns are named ``platform.feature`` where the feature half is one of the
volume counts (num_comments, num_posts, num_likes, num_shares) or the valence
aggregates (avg_comment_length, avg_sentiment, avg_polarity). A table may
carry, per column, the node ids whose activity the column aggregates; those
annotations are what leader reweighting acts on.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ..leaders import LeaderWeights
from ..series import Frequency, TimeSeries, parse_period

__all__ = [
    "VOLUME_FEATURES",
    "VALENCE_FEATURES",
    "FEATURE_MODES",
    "FeatureTable",
    "feature_kind",
    "columns_for_mode",
    "apply_leader_weights",
    "normalize_columns",
]

logger = logging.getLogger(__name__)

VOLUME_FEATURES = ("num_comments", "num_posts", "num_likes", "num_shares")
VALENCE_FEATURES = ("avg_comment_length", "avg_sentiment", "avg_polarity")
FEATURE_MODES = ("full", "attention_only", "endorsement_only", "none")

_BOUNDED_FEATURES = ("avg_sentiment", "avg_polarity")
_COLUMN_RE = re.compile(r"^[a-z][a-z0-9_]*\.[a-z_]+$")


def feature_kind(column: str) -> str:
    """'volume' or 'valence' depending on the column's feature half."""
    if not _COLUMN_RE.match(column):
        raise ValueError(f"column {column!r} is not of the form platform.feature")
    feature = column.split(".", 1)[1]
    if feature in VOLUME_FEATURES:
        return "volume"
    if feature in VALENCE_FEATURES:
        return "valence"
    raise ValueError(
        f"unknown feature {feature!r}; expected one of "
        f"{VOLUME_FEATURES + VALENCE_FEATURES}"
    )


def columns_for_mode(columns: Sequence[str], mode: str) -> tuple[str, ...]:
    """Subset of columns a feature mode admits.

    'full' keeps everything, 'attention_only' the volume counts,
    'endorsement_only' the valence aggregates, and 'none' drops all columns.
    The attention and endorsement subsets partition the full set.
    """
    if mode not in FEATURE_MODES:
        raise ValueError(f"feature mode must be one of {FEATURE_MODES}, got {mode!r}")
    if mode == "none":
        return ()
    if mode == "full":
        return tuple(columns)
    wanted = "volume" if mode == "attention_only" else "valence"
    return tuple(c for c in columns if feature_kind(c) == wanted)


@dataclass(frozen=True)
class FeatureTable:
    """Period-aligned feature matrix with optional contributor annotations.

    `values[i, j]` is column j at period i. `contributors` maps a column name
    to the node ids behind it (absent columns have no annotation); None means
    the table carries no annotations at all. Raw tables enforce the physical
    ranges (counts and lengths non-negative, sentiment and polarity within
    [-1, 1]); tables marked `weighted` have been rescaled by signed leader
    weights and skip those range checks.
    """

    periods: tuple[str, ...]
    columns: tuple[str, ...]
    values: np.ndarray
    contributors: Mapping[str, tuple[str, ...]] | None = None
    weighted: bool = False

    def __post_init__(self) -> None:
        periods = tuple(str(p) for p in self.periods)
        columns = tuple(str(c) for c in self.columns)
        if not periods:
            raise ValueError("a feature table needs at least one period")
        if not columns:
            raise ValueError("a feature table needs at least one column")
        if len(set(columns)) != len(columns):
            raise ValueError("column names must be unique")
        frequency = parse_period(periods[0])[1]
        parsed = [parse_period(p) for p in periods]
        for label, (_, freq) in zip(periods, parsed):
            if freq is not frequency:
                raise ValueError(f"period {label!r} mixes frequencies")
        keys = [p for p, _ in parsed]
        if any(b <= a for a, b in zip(keys, keys[1:])):
            raise ValueError("periods must be strictly increasing")
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (len(periods), len(columns)):
            raise ValueError(
                f"values must be {(len(periods), len(columns))}, got {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("feature values must be finite")
        for j, column in enumerate(columns):
            kind = feature_kind(column)
            feature = column.split(".", 1)[1]
            if not self.weighted:
                if feature in _BOUNDED_FEATURES:
                    if np.any(values[:, j] < -1.0) or np.any(values[:, j] > 1.0):
                        raise ValueError(f"{column} must lie in [-1, 1]")
                elif np.any(values[:, j] < 0.0):
                    raise ValueError(f"{column} must be non-negative ({kind})")
        contributors = self.contributors
        if contributors is not None:
            cleaned: dict[str, tuple[str, ...]] = {}
            for column, nodes in contributors.items():
                if column not in columns:
                    raise ValueError(f"contributor annotation for unknown column {column!r}")
                cleaned[column] = tuple(str(n) for n in nodes)
            contributors = cleaned
        values.flags.writeable = False
        object.__setattr__(self, "periods", periods)
        object.__setattr__(self, "columns", columns)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "contributors", contributors)

    @property
    def frequency(self) -> Frequency:
        return parse_period(self.periods[0])[1]

    def __len__(self) -> int:
        return len(self.periods)

    def column_index(self, column: str) -> int:
        try:
            return self.columns.index(column)
        except ValueError as exc:
            raise KeyError(f"no column {column!r}") from exc

    def select(self, columns: Sequence[str]) -> "FeatureTable":
        """Table restricted to the given columns (order preserved as given)."""
        idx = [self.column_index(c) for c in columns]
        contributors = None
        if self.contributors is not None:
            contributors = {c: self.contributors[c] for c in columns if c in self.contributors}
        return FeatureTable(
            periods=self.periods,
            columns=tuple(columns),
            values=self.values[:, idx],
            contributors=contributors,
            weighted=self.weighted,
        )

    def for_mode(self, mode: str) -> "FeatureTable | None":
        """Feature-mode subset; None when the mode drops every column."""
        kept = columns_for_mode(self.columns, mode)
        if not kept:
            return None
        return self.select(kept)

    def aligned_with(self, series: TimeSeries) -> bool:
        return list(self.periods) == series.labels


def apply_leader_weights(table: FeatureTable, weights: LeaderWeights) -> FeatureTable:
    """Rescale each annotated column by its contributors' mean signed weight.

    A column whose annotation lists no contributors is left unchanged. A table
    without annotations is returned unchanged (every implicit weight is one)
    with a loud warning, since that silently disables leader weighting.
    Contributor ids must exist in the weight assignment.
    """
    if table.contributors is None:
        logger.warning(
            "feature table has no contributor annotations; leader weighting "
            "leaves every column unchanged"
        )
        return FeatureTable(
            periods=table.periods,
            columns=table.columns,
            values=table.values,
            contributors=None,
            weighted=True,
        )
    by_node = dict(weights.weights)
    values = np.array(table.values, dtype=np.float64)
    for column, nodes in table.contributors.items():
        if not nodes:
            continue
        missing = [n for n in nodes if n not in by_node]
        if missing:
            raise ValueError(
                f"column {column!r} lists contributors absent from the graph: {missing}"
            )
        mean_weight = float(np.mean([by_node[n] for n in nodes]))
        values[:, table.column_index(column)] *= mean_weight
    return FeatureTable(
        periods=table.periods,
        columns=table.columns,
        values=values,
        contributors=table.contributors,
        weighted=True,
    )


@dataclass(frozen=True)
class ColumnScaling:
    """Per-column min-max parameters fitted on a row prefix."""

    columns: tuple[str, ...]
    minima: np.ndarray
    ranges: np.ndarray


def normalize_columns(
    table: FeatureTable, fit_rows: int | None = None
) -> tuple[FeatureTable, "ColumnScaling"]:
    """Min-max scale every column using only the first `fit_rows` rows.

    Fitting on a prefix keeps held-out rows from influencing the scaling.
    Constant columns map to zero. Rows beyond the prefix may fall outside
    [0, 1]; that is expected and harmless downstream.
    """
    n = len(table)
    rows = n if fit_rows is None else int(fit_rows)
    if not 1 <= rows <= n:
        raise ValueError(f"fit_rows must lie in [1, {n}], got {fit_rows}")
    head = table.values[:rows]
    minima = head.min(axis=0)
    ranges = head.max(axis=0) - minima
    safe = np.where(ranges > 0.0, ranges, 1.0)
    scaled = (table.values - minima) / safe
    scaled[:, ranges <= 0.0] = 0.0
    return (
        FeatureTable(
            periods=table.periods,
            columns=table.columns,
            values=scaled,
            contributors=table.contributors,
            weighted=True,
        ),
        ColumnScaling(columns=table.columns, minima=minima.copy(), ranges=safe.copy()),
    )
