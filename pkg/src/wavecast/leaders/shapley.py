"""Shapley values for the neighbor-support coalition game on a trust network.

The characteristic function counts the coalition members that have at least
`neighbor_threshold` of their trust neighbors inside the coalition, so a
node's Shapley value measures how often its arrival tips itself or its
neighbors into being supported, averaged over all arrival orders.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "TooLarge",
    "CharacteristicFn",
    "ShapleyResult",
    "characteristic_value",
    "shapley_exact",
    "shapley_monte_carlo",
    "compute_shapley",
]


class TooLarge(ValueError):
    """The graph exceeds the exact-enumeration limit."""


@dataclass(frozen=True)
class CharacteristicFn:
    """In-coalition neighbor count a member needs to count as supported."""

    neighbor_threshold: int = 1

    def __post_init__(self) -> None:
        if int(self.neighbor_threshold) < 1:
            raise ValueError("neighbor_threshold must be at least 1")
        object.__setattr__(self, "neighbor_threshold", int(self.neighbor_threshold))


@dataclass(frozen=True)
class ShapleyResult:
    """Per-node Shapley values plus computation metadata."""

    node_ids: tuple[str, ...]
    values: np.ndarray = field(repr=False)
    mode: str = "exact"
    num_samples: int = 0
    seed: int = 0
    standard_errors: np.ndarray | None = field(default=None, repr=False)

    @property
    def sp(self) -> dict[str, float]:
        """Node id to Shapley value map."""
        return {node_id: float(v) for node_id, v in zip(self.node_ids, self.values)}

    def of(self, node_id: str) -> float:
        return float(self.values[self.node_ids.index(node_id)])


def _default_ids(n: int) -> tuple[str, ...]:
    return tuple(str(k) for k in range(n))


def characteristic_value(
    coalition: Iterable[int] | np.ndarray,
    adjacency: np.ndarray,
    fn: CharacteristicFn | None = None,
) -> int:
    """Count of coalition members with enough trust neighbors in the coalition.

    `coalition` is a boolean membership mask or an iterable of node indices;
    the empty coalition is worth 0.
    """
    fn = fn or CharacteristicFn()
    a = np.asarray(adjacency).astype(bool)
    coalition = np.asarray(coalition)
    if coalition.dtype == bool:
        members = np.flatnonzero(coalition)
    else:
        members = np.asarray(sorted(set(int(v) for v in coalition)), dtype=int)
    if members.size == 0:
        return 0
    inside = a[np.ix_(members, members)].sum(axis=1)
    return int(np.count_nonzero(inside >= fn.neighbor_threshold))


def shapley_exact(
    adjacency: np.ndarray,
    fn: CharacteristicFn | None = None,
    node_ids: Sequence[str] | None = None,
    exact_limit: int = 12,
) -> ShapleyResult:
    """Exact Shapley values by subset enumeration (2^n coalitions, bitmask keyed).

    Each node's value is the factorial-weighted sum of its marginal
    contributions v(C + node) - v(C) over all coalitions C not containing it.
    """
    fn = fn or CharacteristicFn()
    a = np.asarray(adjacency).astype(bool)
    n = a.shape[0]
    if n > exact_limit:
        raise TooLarge(f"{n} nodes exceeds the exact enumeration limit of {exact_limit}")
    threshold = fn.neighbor_threshold
    neighbor_masks = [int(sum(1 << int(j) for j in np.flatnonzero(a[i]))) for i in range(n)]

    values = np.zeros(1 << n)
    for mask in range(1, 1 << n):
        count = 0
        m = mask
        while m:
            i = (m & -m).bit_length() - 1
            m &= m - 1
            if (neighbor_masks[i] & mask).bit_count() >= threshold:
                count += 1
        values[mask] = count

    fact = [factorial(k) for k in range(n + 1)]
    total = fact[n]
    shapley = np.zeros(n)
    for mask in range(1 << n):
        size = mask.bit_count()
        weight = fact[size] * fact[n - size - 1] / total
        for i in range(n):
            if not mask & (1 << i):
                shapley[i] += weight * (values[mask | (1 << i)] - values[mask])
    shapley.flags.writeable = False
    return ShapleyResult(
        node_ids=tuple(node_ids) if node_ids is not None else _default_ids(n),
        values=shapley,
        mode="exact",
    )


def shapley_monte_carlo(
    adjacency: np.ndarray,
    fn: CharacteristicFn | None = None,
    num_samples: int = 10000,
    seed: int = 0,
    node_ids: Sequence[str] | None = None,
) -> ShapleyResult:
    """Permutation-sampled Shapley estimates with per-node standard errors.

    Each sampled arrival order is processed incrementally: adding node i can
    contribute through its own support status and by pushing already-present
    neighbors across the threshold, so a permutation costs O(n + arcs) rather
    than a fresh characteristic evaluation per prefix.
    """
    fn = fn or CharacteristicFn()
    a = np.asarray(adjacency).astype(bool)
    n = a.shape[0]
    if num_samples < 1:
        raise ValueError("num_samples must be positive")
    threshold = fn.neighbor_threshold
    rng = np.random.default_rng(seed)
    neighbors = [np.flatnonzero(a[i]) for i in range(n)]
    sums = np.zeros(n)
    sums_sq = np.zeros(n)
    for _ in range(num_samples):
        order = rng.permutation(n)
        present = np.zeros(n, dtype=bool)
        inside_count = np.zeros(n, dtype=np.int64)
        for i in order:
            gain = 0
            for j in neighbors[i]:
                if present[j]:
                    inside_count[j] += 1
                    if inside_count[j] == threshold:
                        gain += 1  # neighbor j just became supported
                    inside_count[i] += 1
            if inside_count[i] >= threshold:
                gain += 1  # node i arrives already supported
            present[i] = True
            sums[i] += gain
            sums_sq[i] += gain * gain
    means = sums / num_samples
    variances = np.maximum(sums_sq / num_samples - means**2, 0.0)
    if num_samples > 1:
        variances *= num_samples / (num_samples - 1)
    errors = np.sqrt(variances / num_samples)
    means.flags.writeable = False
    return ShapleyResult(
        node_ids=tuple(node_ids) if node_ids is not None else _default_ids(n),
        values=means,
        mode="monte_carlo",
        num_samples=num_samples,
        seed=seed,
        standard_errors=errors,
    )


def compute_shapley(
    adjacency: np.ndarray,
    node_ids: Sequence[str] | None = None,
    fn: CharacteristicFn | None = None,
    exact_limit: int = 12,
    mc_samples: int = 10000,
    seed: int = 0,
) -> ShapleyResult:
    """Exact values for small graphs, permutation sampling beyond `exact_limit`."""
    n = np.asarray(adjacency).shape[0]
    if node_ids is not None and len(node_ids) != n:
        raise ValueError("node_ids must match the adjacency size")
    if n <= exact_limit:
        return shapley_exact(adjacency, fn, node_ids=node_ids, exact_limit=exact_limit)
    return shapley_monte_carlo(
        adjacency, fn, num_samples=mc_samples, seed=seed, node_ids=node_ids
    )
