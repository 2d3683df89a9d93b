"""End-to-end opinion-leader detection and influence-weight assignment.

The pipeline derives a trust network from interaction counts, scores every
node by centrality and Shapley value, keeps an influence-based candidate pool,
drops candidates for whom settling is never rational in the confidence game,
and searches coalitions for the best synergy score. Detected leaders then
radiate exponentially decaying signed weights over the interaction graph.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .centrality import CentralityVector, compute_centralities
from .games import GameParams, payoff_matrices
from .graph import SocialGraph, TrustModel, TrustResult, build_trust_graph
from .shapley import CharacteristicFn, ShapleyResult, compute_shapley
from .synergy import SynergyParams, coalition_synergy, pair_distance

__all__ = [
    "EmptyPool",
    "SearchConfig",
    "Coalition",
    "DetectionResult",
    "LeaderWeights",
    "detect_leaders",
    "assign_weights",
]

logger = logging.getLogger(__name__)


class EmptyPool(ValueError):
    """Fewer than two candidates survive pool construction."""


@dataclass(frozen=True)
class SearchConfig:
    """Knobs of the candidate pool, viability filter, and coalition search."""

    ec_percentile: float = 50.0
    neighbor_threshold: int = 1
    max_coalition_size: int = 5
    exact_enumeration_limit: int = 18
    beam_width: int = 8
    require_agreement_viable: bool = True
    distance_mode: str = "pairwise"
    exact_shapley_limit: int = 12
    mc_samples: int = 10000
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= float(self.ec_percentile) <= 100.0:
            raise ValueError("ec_percentile must lie in [0, 100]")
        if self.neighbor_threshold < 1:
            raise ValueError("neighbor_threshold must be at least 1")
        if self.max_coalition_size < 2:
            raise ValueError("max_coalition_size must be at least 2")
        if self.beam_width < 1:
            raise ValueError("beam_width must be at least 1")
        if self.distance_mode not in ("pairwise", "literal"):
            raise ValueError("distance_mode must be 'pairwise' or 'literal'")
        if self.mc_samples < 1:
            raise ValueError("mc_samples must be positive")


@dataclass(frozen=True)
class Coalition:
    """A detected leader set with its synergy score and Shapley mass."""

    members: tuple[str, ...]
    phi: float
    sp_sum: float
    x_size: int

    def __post_init__(self) -> None:
        members = tuple(sorted(str(m) for m in self.members))
        if not members:
            raise ValueError("a coalition needs at least one member")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "x_size", len(members))


@dataclass(frozen=True)
class DetectionResult:
    """The winning coalition plus every intermediate artifact of the search."""

    coalition: Coalition
    candidate_pool: tuple[str, ...]
    dropped_candidates: tuple[str, ...]
    trust: TrustResult = field(repr=False)
    centralities: CentralityVector = field(repr=False)
    shapley: ShapleyResult = field(repr=False)
    mean_distance: float = 0.0
    distance_mode: str = "pairwise"
    config: SearchConfig = field(default_factory=SearchConfig)


@dataclass(frozen=True)
class LeaderWeights:
    """Signed, hop-decayed influence weight of every node relative to the leaders.

    `hops` records the interaction-graph distance to the nearest leader, with
    -1 for unreachable nodes (their weight is zero, as is every weight beyond
    `max_hops`). Leaders themselves sit at hop 0 with |weight| = 1.
    """

    node_ids: tuple[str, ...]
    weights: dict[str, float]
    hops: dict[str, int]
    leaders: frozenset[str]
    decay_kappa: float
    max_hops: int

    def as_array(self) -> np.ndarray:
        return np.array([self.weights[i] for i in self.node_ids])


def _candidate_pool(centralities: CentralityVector, config: SearchConfig) -> list[str]:
    ec = centralities.eigenvector
    cutoff = float(np.percentile(ec, config.ec_percentile))
    pool = [centralities.node_ids[k] for k in range(len(ec)) if ec[k] >= cutoff]
    if not pool:
        logger.warning(
            "influence percentile %.1f left the pool empty; keeping the top two nodes",
            config.ec_percentile,
        )
        order = np.argsort(-ec, kind="stable")[:2]
        pool = [centralities.node_ids[int(k)] for k in order]
    if len(pool) < 2:
        raise EmptyPool(f"only {len(pool)} candidate(s) available; need at least 2")
    return pool


def _mean_pool_distance(
    centralities: CentralityVector, pool: Sequence[str], params: GameParams, mode: str
) -> float:
    distances = [
        pair_distance(a, b, centralities, lam=params.lam, rho=params.rho, mode=mode)
        for a, b in combinations(pool, 2)
    ]
    return max(float(np.mean(distances)), 1e-6)


def _agreement_viable(
    candidate: str,
    pool: Sequence[str],
    trust: TrustResult,
    params: GameParams,
    tol: float = 1e-12,
) -> bool:
    """Whether settling is a best response against some stance of some opponent."""
    a = trust.node_ids.index(candidate)
    for other in pool:
        if other == candidate:
            continue
        b = trust.node_ids.index(other)
        game_params = replace(
            params,
            u_a=float(np.clip(trust.composite[a, b], 0.01, 0.99)),
            u_b=float(np.clip(trust.composite[b, a], 0.01, 0.99)),
        )
        m = payoff_matrices("confidence", game_params).m_a
        agreement_row = m.shape[0] - 1
        for col in range(m.shape[1]):
            if m[agreement_row, col] >= m[:, col].max() - tol:
                return True
    return False


def _search_coalitions(
    pool: list[str],
    centralities: CentralityVector,
    shapley: ShapleyResult,
    synergy_params: SynergyParams,
    config: SearchConfig,
) -> Coalition:
    max_size = min(config.max_coalition_size, len(pool))
    best: tuple[float, float, tuple[str, ...]] | None = None

    def score(members: Sequence[str]) -> tuple[float, float, tuple[str, ...]]:
        nonlocal best
        ids = tuple(sorted(members))
        phi = coalition_synergy(ids, centralities, shapley, synergy_params)
        sp_sum = sum(shapley.of(i) for i in ids)
        key = (phi, sp_sum, ids)
        if best is None or _ranks_above(key, best):
            best = key
        return key

    if len(pool) <= config.exact_enumeration_limit:
        for size in range(2, max_size + 1):
            for members in combinations(sorted(pool), size):
                score(members)
    else:
        pair_keys = sorted(
            (score(pair) for pair in combinations(sorted(pool), 2)),
            key=lambda k: (-k[0], -k[1], k[2]),
        )
        beam = [k[2] for k in pair_keys[: config.beam_width]]
        for _ in range(3, max_size + 1):
            grown: dict[tuple[str, ...], tuple[float, float, tuple[str, ...]]] = {}
            for members in beam:
                for node in pool:
                    if node in members:
                        continue
                    extended = tuple(sorted((*members, node)))
                    if extended not in grown:
                        grown[extended] = score(extended)
            if not grown:
                break
            ranked = sorted(grown.values(), key=lambda k: (-k[0], -k[1], k[2]))
            beam = [k[2] for k in ranked[: config.beam_width]]
    assert best is not None
    return Coalition(members=best[2], phi=best[0], sp_sum=best[1], x_size=len(best[2]))


def _ranks_above(
    a: tuple[float, float, tuple[str, ...]], b: tuple[float, float, tuple[str, ...]]
) -> bool:
    """Strict 'a ranks above b': synergy desc, Shapley mass desc, ids asc."""
    if a[0] != b[0]:
        return a[0] > b[0]
    if a[1] != b[1]:
        return a[1] > b[1]
    return a[2] < b[2]


def detect_leaders(
    graph: SocialGraph,
    trust_model: TrustModel | None = None,
    fn: CharacteristicFn | None = None,
    game_params: GameParams | None = None,
    synergy_params: SynergyParams | None = None,
    config: SearchConfig | None = None,
) -> DetectionResult:
    """Detect the opinion-leader coalition of a social interaction graph.

    Stages: trust network, centralities, Shapley values (exact on small
    graphs, seeded sampling beyond `exact_shapley_limit`), eigenvector-
    percentile candidate pool, settling-viability filter via the confidence
    game (skipped with a warning if it would leave fewer than two candidates),
    then exhaustive coalition enumeration up to `max_coalition_size` for pools
    within `exact_enumeration_limit` and beam-greedy growth otherwise.
    """
    trust_model = trust_model or TrustModel()
    game_params = game_params or GameParams()
    synergy_params = synergy_params or SynergyParams()
    config = config or SearchConfig()
    fn = fn or CharacteristicFn(config.neighbor_threshold)

    trust = build_trust_graph(graph, trust_model)
    centralities = compute_centralities(trust.adjacency, graph.node_ids)
    shapley = compute_shapley(
        trust.adjacency,
        node_ids=graph.node_ids,
        fn=fn,
        exact_limit=config.exact_shapley_limit,
        mc_samples=config.mc_samples,
        seed=config.seed,
    )

    pool = _candidate_pool(centralities, config)
    mean_distance = _mean_pool_distance(
        centralities, pool, game_params, config.distance_mode
    )

    dropped: list[str] = []
    if config.require_agreement_viable:
        distance_params = replace(game_params, d=mean_distance)
        viable = [c for c in pool if _agreement_viable(c, pool, trust, distance_params)]
        dropped = [c for c in pool if c not in viable]
        if len(viable) >= 2:
            pool = viable
        else:
            logger.warning(
                "the settling-viability filter left %d candidate(s); keeping the unfiltered pool",
                len(viable),
            )
            dropped = []

    coalition = _search_coalitions(pool, centralities, shapley, synergy_params, config)
    return DetectionResult(
        coalition=coalition,
        candidate_pool=tuple(pool),
        dropped_candidates=tuple(dropped),
        trust=trust,
        centralities=centralities,
        shapley=shapley,
        mean_distance=mean_distance,
        distance_mode=config.distance_mode,
        config=config,
    )


def assign_weights(
    graph: SocialGraph,
    coalition: Coalition | Iterable[str],
    decay_kappa: float = float(np.log(2.0)),
    max_hops: int = 3,
) -> LeaderWeights:
    """Signed exponential hop-decay weights radiating from the leader set.

    Hops are counted on the undirected interaction graph (an arc in either
    direction connects). Each node's weight is exp(-decay_kappa * hops)
    carrying the sign of its own valence (zero valence counts as positive);
    nodes beyond `max_hops` or unreachable from every leader get zero.
    """
    members = coalition.members if isinstance(coalition, Coalition) else coalition
    leader_set = frozenset(str(node) for node in members)
    if not leader_set:
        raise ValueError("at least one leader is required")
    unknown = leader_set.difference(graph.node_ids)
    if unknown:
        raise ValueError(f"leaders {sorted(unknown)} are not graph nodes")
    if decay_kappa <= 0.0:
        raise ValueError("decay_kappa must be positive")
    if max_hops < 1:
        raise ValueError("max_hops must be positive")

    connected = (graph.counts > 0) | (graph.counts.T > 0)
    index = {node_id: k for k, node_id in enumerate(graph.node_ids)}
    hops = np.full(graph.num_nodes, -1, dtype=np.int64)
    queue: deque[int] = deque()
    for leader in sorted(leader_set):
        hops[index[leader]] = 0
        queue.append(index[leader])
    while queue:
        v = queue.popleft()
        for w in np.flatnonzero(connected[v]):
            if hops[w] < 0:
                hops[w] = hops[v] + 1
                queue.append(int(w))

    weights: dict[str, float] = {}
    hop_map: dict[str, int] = {}
    for k, node_id in enumerate(graph.node_ids):
        hop = int(hops[k])
        hop_map[node_id] = hop
        if hop < 0 or hop > max_hops:
            weights[node_id] = 0.0
        else:
            sign = -1.0 if graph.attributes[node_id].valence < 0 else 1.0
            weights[node_id] = sign * float(np.exp(-decay_kappa * hop))
    return LeaderWeights(
        node_ids=graph.node_ids,
        weights=weights,
        hops=hop_map,
        leaders=leader_set,
        decay_kappa=float(decay_kappa),
        max_hops=int(max_hops),
    )
