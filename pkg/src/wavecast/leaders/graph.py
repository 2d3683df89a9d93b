"""Social interaction graph, pairwise trust channels, and the derived trust network."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "EmptyGraph",
    "NodeAttributes",
    "SocialGraph",
    "TrustModel",
    "TrustResult",
    "direct_trust",
    "indirect_trust",
    "recommended_trust",
    "build_trust_graph",
]


class EmptyGraph(ValueError):
    """The graph has no nodes."""


@dataclass(frozen=True)
class NodeAttributes:
    """Reputation traits and sentiment orientation of one participant.

    The three traits live in [0, 1] (default 0.5 when a data source does not
    provide them); `valence` in [-1, 1] records whether the participant's
    influence pushes the forecast target up or down.
    """

    goodwill: float = 0.5
    power: float = 0.5
    uprightness: float = 0.5
    valence: float = 1.0

    def __post_init__(self) -> None:
        for name in ("goodwill", "power", "uprightness"):
            v = float(getattr(self, name))
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
            object.__setattr__(self, name, v)
        valence = float(self.valence)
        if not -1.0 <= valence <= 1.0:
            raise ValueError(f"valence must lie in [-1, 1], got {valence}")
        object.__setattr__(self, "valence", valence)

    @property
    def reputation(self) -> float:
        """Mean of the three reputation traits."""
        return (self.goodwill + self.power + self.uprightness) / 3.0


@dataclass(frozen=True)
class SocialGraph:
    """Directed interaction counts between named participants.

    `counts[i, j]` is the number of interactions the i-th node directed at the
    j-th node (an integer; at most one arc per ordered pair, so parallel arcs
    must be pre-aggregated). Self-interaction is not modeled.
    """

    node_ids: tuple[str, ...]
    attributes: Mapping[str, NodeAttributes]
    counts: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        ids = tuple(str(i) for i in self.node_ids)
        if not ids:
            raise EmptyGraph("a graph needs at least one node")
        if len(set(ids)) != len(ids):
            raise ValueError("node ids must be unique")
        missing = [i for i in ids if i not in self.attributes]
        if missing:
            raise ValueError(f"attributes missing for nodes {missing}")
        counts = np.asarray(self.counts, dtype=np.float64)
        n = len(ids)
        if counts.shape != (n, n):
            raise ValueError(f"counts must be {n}x{n}, got {counts.shape}")
        if not np.all(np.isfinite(counts)) or np.any(counts < 0):
            raise ValueError("interaction counts must be finite and non-negative")
        if np.any(counts != np.round(counts)):
            raise ValueError("interaction counts must be whole numbers")
        if np.any(np.diag(counts) != 0):
            raise ValueError("self-interaction counts must be zero")
        counts = counts.copy()
        counts.flags.writeable = False
        object.__setattr__(self, "node_ids", ids)
        object.__setattr__(self, "attributes", dict(self.attributes))
        object.__setattr__(self, "counts", counts)

    @property
    def num_nodes(self) -> int:
        return len(self.node_ids)

    def index_of(self, node_id: str) -> int:
        return self.node_ids.index(node_id)

    def reputations(self) -> np.ndarray:
        return np.array([self.attributes[i].reputation for i in self.node_ids])

    def valences(self) -> np.ndarray:
        return np.array([self.attributes[i].valence for i in self.node_ids])

    @staticmethod
    def from_edges(
        nodes: Mapping[str, NodeAttributes],
        edges: Iterable[tuple[str, str, float]],
    ) -> "SocialGraph":
        """Build a graph from (source, target, count) arcs; duplicate arcs are errors."""
        ids = tuple(sorted(nodes))
        index = {node_id: k for k, node_id in enumerate(ids)}
        counts = np.zeros((len(ids), len(ids)))
        seen = set()
        for source, target, count in edges:
            if source not in index or target not in index:
                raise ValueError(f"arc ({source}, {target}) references an unknown node")
            if source == target:
                raise ValueError(f"self-loop on {source} is not allowed")
            if (source, target) in seen:
                raise ValueError(f"duplicate arc ({source}, {target})")
            seen.add((source, target))
            counts[index[source], index[target]] = float(count)
        return SocialGraph(node_ids=ids, attributes=dict(nodes), counts=counts)


@dataclass(frozen=True)
class TrustModel:
    """Thresholds and mixing weights of the three-channel trust computation.

    Each threshold lives in [0.5, 1): a channel only certifies trust when it
    reaches at least half of its own scale. The mixing weights must be
    non-negative and sum to one, so the composite score stays in [0, 1].
    """

    k: float = 0.5
    l: float = 0.5
    s: float = 0.5
    w_d: float = 0.5
    w_i: float = 0.3
    w_r: float = 0.2

    def __post_init__(self) -> None:
        for name in ("k", "l", "s"):
            v = float(getattr(self, name))
            if not 0.5 <= v < 1.0:
                raise ValueError(f"threshold {name} must lie in [0.5, 1), got {v}")
            object.__setattr__(self, name, v)
        weights = (self.w_d, self.w_i, self.w_r)
        if any(w < 0 for w in weights):
            raise ValueError("mixing weights must be non-negative")
        if abs(sum(weights) - 1.0) > 1e-12:
            raise ValueError("mixing weights must sum to 1")


@dataclass(frozen=True)
class TrustResult:
    """All pairwise trust channels plus the composite score and trust edge set.

    `direct`, `indirect`, and `recommended` are directed matrices; `composite`
    symmetrizes the first two channels and adds the pair's mean reputation, so
    it is symmetric with entries in [0, 1]. `adjacency` is the undirected
    boolean trust network.
    """

    node_ids: tuple[str, ...]
    direct: np.ndarray = field(repr=False)
    indirect: np.ndarray = field(repr=False)
    recommended: np.ndarray = field(repr=False)
    composite: np.ndarray = field(repr=False)
    adjacency: np.ndarray = field(repr=False)
    model: TrustModel = field(default_factory=TrustModel)

    @property
    def num_nodes(self) -> int:
        return len(self.node_ids)

    def trust_edges(self) -> list[tuple[str, str]]:
        """Undirected trust edges as sorted id pairs, lexicographic order."""
        edges = []
        for i in range(self.num_nodes):
            for j in range(i + 1, self.num_nodes):
                if self.adjacency[i, j]:
                    edges.append(tuple(sorted((self.node_ids[i], self.node_ids[j]))))
        return sorted(edges)


def direct_trust(counts: np.ndarray) -> np.ndarray:
    """Interaction counts normalized per source by its busiest outgoing arc.

    A node with no outgoing interactions extends zero direct trust to everyone.
    """
    counts = np.asarray(counts, dtype=np.float64)
    row_max = counts.max(axis=1)
    dt = np.zeros_like(counts)
    active = row_max > 0
    dt[active] = counts[active] / row_max[active, None]
    np.fill_diagonal(dt, 0.0)
    return dt


def indirect_trust(direct: np.ndarray) -> np.ndarray:
    """Best single-intermediary trust: max over z of min(DT(x,z), DT(z,y))."""
    n = direct.shape[0]
    idt = np.zeros_like(direct)
    for x in range(n):
        for y in range(n):
            if x == y:
                continue
            best = 0.0
            for z in range(n):
                if z == x or z == y:
                    continue
                through = min(direct[x, z], direct[z, y])
                if through > best:
                    best = through
            idt[x, y] = best
    return idt


def recommended_trust(
    direct: np.ndarray, reputations: np.ndarray, threshold: float
) -> np.ndarray:
    """Reputation-weighted mean of qualifying third-party direct trust.

    Only recommenders whose own direct trust toward the target reaches
    `threshold` participate; with no qualifying recommender the value is zero.
    """
    n = direct.shape[0]
    rt = np.zeros_like(direct)
    for x in range(n):
        for y in range(n):
            if x == y:
                continue
            num = 0.0
            den = 0.0
            for z in range(n):
                if z == x or z == y:
                    continue
                if direct[z, y] >= threshold:
                    num += reputations[z] * direct[z, y]
                    den += reputations[z]
            if den > 0:
                rt[x, y] = num / den
    return rt


def build_trust_graph(graph: SocialGraph, model: TrustModel | None = None) -> TrustResult:
    """Evaluate all trust channels and derive the undirected trust network.

    An unordered pair is trust-connected when any channel clears its threshold
    in either direction: direct >= k, indirect >= l, or recommended >= s.
    """
    model = model or TrustModel()
    if graph.num_nodes == 0:
        raise EmptyGraph("a graph needs at least one node")
    dt = direct_trust(graph.counts)
    idt = indirect_trust(dt)
    reputations = graph.reputations()
    rt = recommended_trust(dt, reputations, model.k)

    composite = (
        model.w_d * (dt + dt.T) / 2.0
        + model.w_i * (idt + idt.T) / 2.0
        + model.w_r * (reputations[:, None] + reputations[None, :]) / 2.0
    )
    np.fill_diagonal(composite, 0.0)

    qualifies = (dt >= model.k) | (idt >= model.l) | (rt >= model.s)
    adjacency = qualifies | qualifies.T
    np.fill_diagonal(adjacency, False)

    for arr in (dt, idt, rt, composite, adjacency):
        arr.flags.writeable = False
    return TrustResult(
        node_ids=graph.node_ids,
        direct=dt,
        indirect=idt,
        recommended=rt,
        composite=composite,
        adjacency=adjacency,
        model=model,
    )
