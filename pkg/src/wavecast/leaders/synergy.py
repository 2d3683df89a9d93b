"""Pairwise synergy scores, coalition fitness, and the social distance measure."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .centrality import CentralityVector
from .shapley import ShapleyResult

__all__ = [
    "TooSmall",
    "SynergyParams",
    "pair_synergy",
    "coalition_synergy",
    "pair_distance",
]

logger = logging.getLogger(__name__)


class TooSmall(ValueError):
    """A coalition needs at least two members to exhibit synergy."""


@dataclass(frozen=True)
class SynergyParams:
    """Scale (`delta`), interaction strength (`partial`), and exponent (`c`).

    All three live in [0, 1]; zero `delta` or `partial` annihilates the score.
    """

    delta: float = 1.0
    partial: float = 1.0
    c: float = 1.0

    def __post_init__(self) -> None:
        for name in ("delta", "partial", "c"):
            v = float(getattr(self, name))
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
            object.__setattr__(self, name, v)


def pair_synergy(
    node_i: str,
    node_j: str,
    centralities: CentralityVector,
    shapley: ShapleyResult,
    params: SynergyParams | None = None,
) -> float:
    """Mean influence of the pair times its strength-weighted mean game value.

    The two channels multiply, so a pair only scores when both members carry
    network influence (eigenvector centrality) and coalition-game value
    (Shapley) at the same time. Symmetric in the two nodes.
    """
    params = params or SynergyParams()
    i = centralities.node_ids.index(node_i)
    j = centralities.node_ids.index(node_j)
    influence = (float(centralities.eigenvector[i]) + float(centralities.eigenvector[j])) / 2.0
    value = params.partial * (shapley.of(node_i) + shapley.of(node_j)) / 2.0
    return influence * value


def coalition_synergy(
    coalition: Sequence[str],
    centralities: CentralityVector,
    shapley: ShapleyResult,
    params: SynergyParams | None = None,
    allow_singleton: bool = False,
) -> float:
    """Size-discounted sum of pair synergies over all unordered member pairs.

    Each pair's synergy is divided by the coalition size and raised to the
    exponent `c` before the `delta`-weighted sum, so large coalitions must
    earn their extra pairs. Singleton coalitions have no pairs; by default
    they are rejected, but `allow_singleton` lets a caller score them as zero.
    """
    params = params or SynergyParams()
    ids = [str(m) for m in coalition]
    if len(set(ids)) != len(ids):
        raise ValueError("coalition members must be distinct")
    if len(ids) < 2:
        if allow_singleton and len(ids) == 1:
            return 0.0
        raise TooSmall(f"a coalition needs at least 2 members, got {len(ids)}")
    size = len(ids)
    total = 0.0
    for i, j in combinations(ids, 2):
        omega = pair_synergy(i, j, centralities, shapley, params)
        total += params.delta * (omega / size) ** params.c
    return total


def _radical(centralities: CentralityVector, index: int) -> float:
    """sqrt(betweenness * closeness / degree) with a zero-degree guard."""
    dc = float(centralities.degree[index])
    if dc <= 0.0:
        logger.debug(
            "node %s has zero degree; its distance contribution is skipped",
            centralities.node_ids[index],
        )
        return 0.0
    bc = float(centralities.betweenness[index])
    cc = float(centralities.closeness[index])
    return float(np.sqrt(bc * cc / dc))


def pair_distance(
    node_i: str,
    node_j: str,
    centralities: CentralityVector,
    lam: float = 0.25,
    rho: float = 0.25,
    mode: str = "pairwise",
) -> float:
    """Social distance between two nodes from their centrality profiles.

    "pairwise" combines only the two endpoints' centrality radicals; "literal"
    sums the radical over every node except the second endpoint, making the
    distance a near-global quantity that varies only through the clustering
    terms and the excluded node. Both modes add the endpoints' clustering
    coefficients weighted by `lam` and `rho`.
    """
    i = centralities.node_ids.index(node_i)
    j = centralities.node_ids.index(node_j)
    clustering_term = lam * float(centralities.clustering[i]) + rho * float(
        centralities.clustering[j]
    )
    if mode == "pairwise":
        return _radical(centralities, i) + _radical(centralities, j) + clustering_term
    if mode == "literal":
        total = sum(
            _radical(centralities, v)
            for v in range(len(centralities.node_ids))
            if v != j
        )
        return total + clustering_term
    raise ValueError(f"unknown distance mode {mode!r}; choose 'pairwise' or 'literal'")
