"""Seeded synthetic worlds: demand series, social graphs, feature tables.

`generate_series` builds a structured series (trend + seasonality + cycle +
pure tones + Gaussian noise). `generate_scenario` additionally builds a social
graph with a planted densely-interacting coalition, a latent AR(1) driver that
the coalition "posts about" one step before it moves the target, and a feature
table whose informative columns are attributed to the planted nodes while pure
noise columns are attributed to isolated bot accounts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..leaders import NodeAttributes, SocialGraph
from ..series import TimeSeries, parse_period
from .bundle import write_feature_csv, write_graph_csv
from .features import FeatureTable

__all__ = [
    "SyntheticSpec",
    "SyntheticScenario",
    "tone_signal",
    "generate_series",
    "generate_scenario",
    "write_scenario",
]


@dataclass(frozen=True)
class SyntheticSpec:
    """Knobs of the generator; tones are (amplitude, omega, phase) triples
    with omega in radians per sample."""

    length: int = 120
    start_period: str = "2015-01"
    base_level: float = 500.0
    trend_slope: float = 1.0
    seasonal_amplitude: float = 60.0
    seasonal_period: float = 12.0
    cycle_amplitude: float = 0.0
    cycle_period: float = 36.0
    noise_sd: float = 5.0
    tones: tuple[tuple[float, float, float], ...] = ()
    graph_size: int = 20
    coalition_size: int = 3
    coupling_strength: float = 40.0
    noise_feature_count: int = 6

    def __post_init__(self) -> None:
        if int(self.length) < 8:
            raise ValueError("length must be at least 8")
        if float(self.seasonal_period) <= 1 or float(self.cycle_period) <= 1:
            raise ValueError("periods must exceed one sample")
        if float(self.noise_sd) < 0:
            raise ValueError("noise_sd must be non-negative")
        if int(self.coalition_size) < 2:
            raise ValueError("coalition_size must be at least 2")
        if int(self.graph_size) < int(self.coalition_size) + 4:
            raise ValueError("graph_size must exceed coalition_size by at least 4")
        if int(self.noise_feature_count) < 0 or int(self.noise_feature_count) > 12:
            raise ValueError("noise_feature_count must lie in [0, 12]")
        parse_period(self.start_period)
        object.__setattr__(self, "tones", tuple(tuple(map(float, t)) for t in self.tones))


@dataclass(frozen=True)
class SyntheticScenario:
    """One generated world: target, annotated features, graph, ground truth."""

    series: TimeSeries
    features: FeatureTable
    graph: SocialGraph
    planted: tuple[str, ...]
    driver: np.ndarray = field(repr=False)


def tone_signal(length: int, tones) -> np.ndarray:
    """Sum of cosines: sum_k A_k * cos(omega_k * t + phase_k)."""
    t = np.arange(int(length), dtype=np.float64)
    signal = np.zeros_like(t)
    for amplitude, omega, phase in tones:
        signal += float(amplitude) * np.cos(float(omega) * t + float(phase))
    return signal


def _structural_values(spec: SyntheticSpec, rng: np.random.Generator) -> np.ndarray:
    t = np.arange(spec.length, dtype=np.float64)
    values = (
        spec.base_level
        + spec.trend_slope * t
        + spec.seasonal_amplitude * np.sin(2.0 * np.pi * t / spec.seasonal_period)
        + spec.cycle_amplitude * np.sin(2.0 * np.pi * t / spec.cycle_period)
        + tone_signal(spec.length, spec.tones)
    )
    if spec.noise_sd > 0:
        values = values + spec.noise_sd * rng.standard_normal(spec.length)
    return values


def generate_series(spec: SyntheticSpec, seed: int = 0) -> TimeSeries:
    """Structured series without any social-graph coupling."""
    rng = np.random.default_rng(seed)
    start, frequency = parse_period(spec.start_period)
    return TimeSeries("synthetic", start, frequency, _structural_values(spec, rng))


def _node_ids(n: int) -> list[str]:
    width = max(2, len(str(n - 1)))
    return [f"v{i:0{width}d}" for i in range(n)]


_NOISE_COLUMNS = (
    "forum.num_comments",
    "blog.num_likes",
    "video.num_shares",
    "news.avg_polarity",
    "photo.avg_comment_length",
    "music.num_posts",
    "podcast.num_comments",
    "wiki.num_likes",
    "stream.avg_polarity",
    "chat.num_shares",
    "mail.avg_comment_length",
    "board.num_posts",
)


def _random_clustered_graph(
    spec: SyntheticSpec, rng: np.random.Generator
) -> tuple[SocialGraph, list[str], list[str]]:
    """Random clustered interaction graph with a dominant planted coalition.

    Layout: the planted nodes form a heavy mutual clique and draw frequent
    inbound interaction from every "audience" node, which otherwise cluster
    into a few random communities with light internal and sparse
    cross-community traffic. Audience-side interaction counts stay below half
    of any follow count, so after row-max normalization no audience node
    qualifies as a recommender for another and the coalition keeps the only
    globally endorsed position. A couple of "bot" accounts interact with
    nobody; they carry negative valence and later own the pure-noise feature
    columns, sitting at infinite hop distance from any detected coalition.
    """
    n = spec.graph_size
    c = spec.coalition_size
    ids = _node_ids(n)
    planted = ids[:c]
    bot_count = 2 if n - c < 7 else 3
    bots = ids[n - bot_count :]
    audience = ids[c : n - bot_count]

    attributes: dict[str, NodeAttributes] = {}
    for node in planted:
        g, p, u = rng.uniform(0.85, 0.95, size=3)
        attributes[node] = NodeAttributes(g, p, u, rng.uniform(0.6, 0.9))
    for node in audience:
        g, p, u = rng.uniform(0.35, 0.65, size=3)
        attributes[node] = NodeAttributes(g, p, u, rng.uniform(-0.2, 0.5))
    for node in bots:
        g, p, u = rng.uniform(0.2, 0.4, size=3)
        attributes[node] = NodeAttributes(g, p, u, rng.uniform(-0.9, -0.5))

    arcs: dict[tuple[str, str], int] = {}
    for a in planted:
        for b in planted:
            if a != b:
                arcs[(a, b)] = int(rng.integers(25, 41))

    # audience members follow the coalition heavily; replies are rare and light
    for u in audience:
        follows = [p for p in planted if rng.random() < 0.8]
        if not follows:
            follows = [planted[int(rng.integers(len(planted)))]]
        for p in follows:
            arcs[(u, p)] = int(rng.integers(15, 31))
            if rng.random() < 0.3:
                arcs[(p, u)] = int(rng.integers(1, 4))

    # random communities with light internal, sparse cross-community arcs
    shuffled = list(rng.permutation(audience))
    num_clusters = max(1, round(len(shuffled) / 6))
    clusters = [shuffled[k::num_clusters] for k in range(num_clusters)]
    membership = {node: k for k, cluster in enumerate(clusters) for node in cluster}
    for i, u in enumerate(shuffled):
        for v in shuffled[i + 1 :]:
            same = membership[u] == membership[v]
            if rng.random() < (0.5 if same else 0.08):
                lo, hi = (1, 7) if same else (1, 4)
                arcs[(u, v)] = int(rng.integers(lo, hi))
                if rng.random() < 0.5:
                    arcs[(v, u)] = int(rng.integers(lo, hi))

    graph = SocialGraph.from_edges(
        attributes, [(s, t, k) for (s, t), k in arcs.items()]
    )
    return graph, planted, bots


def generate_scenario(spec: SyntheticSpec, seed: int = 0) -> SyntheticScenario:
    """Planted-coalition world.

    The graph is a seeded random clustered graph whose planted coalition
    dominates interaction volume (see `_random_clustered_graph`). A latent
    AR(1) driver moves the target one period later
    (target[t+1] += coupling_strength * driver[t]) and is visible, with mild
    observation noise, in the two columns attributed to the planted nodes.
    All remaining columns are pure noise attributed to isolated bot accounts
    with no path to the coalition.
    """
    rng = np.random.default_rng(seed)
    graph, planted, bots = _random_clustered_graph(spec, rng)

    # latent driver, standardized so coupling_strength is in target units
    innovations = rng.standard_normal(spec.length)
    driver = np.empty(spec.length)
    driver[0] = innovations[0]
    for t in range(1, spec.length):
        driver[t] = 0.8 * driver[t - 1] + innovations[t]
    driver = (driver - driver.mean()) / driver.std()

    values = _structural_values(spec, rng)
    values[1:] += spec.coupling_strength * driver[:-1]
    start, frequency = parse_period(spec.start_period)
    series = TimeSeries("synthetic", start, frequency, values)

    posts = np.clip(50.0 + 10.0 * driver + 0.5 * rng.standard_normal(spec.length), 0.0, None)
    sentiment = np.clip(
        0.6 * np.tanh(driver / 2.0) + 0.05 * rng.standard_normal(spec.length), -1.0, 1.0
    )
    columns = ["social.num_posts", "reviews.avg_sentiment"]
    matrix = [posts, sentiment]
    contributors: dict[str, tuple[str, ...]] = {
        "social.num_posts": tuple(planted),
        "reviews.avg_sentiment": tuple(planted),
    }
    noise_nodes = bots
    for j in range(spec.noise_feature_count):
        column = _NOISE_COLUMNS[j]
        feature = column.split(".", 1)[1]
        if feature in ("avg_sentiment", "avg_polarity"):
            data = np.clip(0.8 * rng.standard_normal(spec.length), -1.0, 1.0)
        elif feature == "avg_comment_length":
            data = np.abs(100.0 + 30.0 * rng.standard_normal(spec.length))
        else:
            data = np.abs(50.0 + 20.0 * rng.standard_normal(spec.length))
        columns.append(column)
        matrix.append(data)
        assigned = tuple(
            noise_nodes[(j + k) % len(noise_nodes)] for k in range(min(3, len(noise_nodes)))
        )
        contributors[column] = assigned

    features = FeatureTable(
        periods=tuple(series.labels),
        columns=tuple(columns),
        values=np.column_stack(matrix),
        contributors=contributors,
    )
    return SyntheticScenario(
        series=series,
        features=features,
        graph=graph,
        planted=tuple(planted),
        driver=driver,
    )


def write_scenario(scenario: SyntheticScenario, out_dir: str | Path) -> dict[str, Path]:
    """Write a scenario as the file bundle the CLI commands consume."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    from ..series import write_series_csv

    paths = {
        "series": out / "series.csv",
        "features": out / "features.csv",
        "contributors": out / "contributors.json",
        "nodes": out / "nodes.csv",
        "edges": out / "edges.csv",
        "planted": out / "planted.json",
    }
    write_series_csv(scenario.series, paths["series"])
    write_feature_csv(scenario.features, paths["features"], paths["contributors"])
    write_graph_csv(scenario.graph, paths["nodes"], paths["edges"])
    paths["planted"].write_text(
        json.dumps({"planted": list(scenario.planted)}, indent=2) + "\n",
        encoding="utf-8",
    )
    return paths
