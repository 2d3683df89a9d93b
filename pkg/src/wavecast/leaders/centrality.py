"""Normalized centrality measures on an undirected boolean adjacency matrix."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CentralityVector",
    "degree_centrality",
    "closeness_centrality",
    "betweenness_centrality",
    "eigenvector_centrality",
    "clustering_coefficients",
    "compute_centralities",
    "connected_components",
]


@dataclass(frozen=True)
class CentralityVector:
    """All centrality vectors for one graph, aligned with `node_ids`."""

    node_ids: tuple[str, ...]
    degree: np.ndarray = field(repr=False)
    closeness: np.ndarray = field(repr=False)
    betweenness: np.ndarray = field(repr=False)
    eigenvector: np.ndarray = field(repr=False)
    clustering: np.ndarray = field(repr=False)

    def of(self, node_id: str) -> dict[str, float]:
        k = self.node_ids.index(node_id)
        return {
            "degree": float(self.degree[k]),
            "closeness": float(self.closeness[k]),
            "betweenness": float(self.betweenness[k]),
            "eigenvector": float(self.eigenvector[k]),
            "clustering": float(self.clustering[k]),
        }


def _validated(adjacency: np.ndarray) -> np.ndarray:
    a = np.asarray(adjacency)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("adjacency must be a square matrix")
    a = a.astype(bool)
    if not np.array_equal(a, a.T):
        raise ValueError("adjacency must be symmetric")
    if np.any(np.diag(a)):
        raise ValueError("adjacency must have an empty diagonal")
    return a


def connected_components(adjacency: np.ndarray) -> list[list[int]]:
    """Vertex index lists of the connected components, BFS order."""
    a = _validated(adjacency)
    n = a.shape[0]
    seen = np.zeros(n, dtype=bool)
    components = []
    for start in range(n):
        if seen[start]:
            continue
        queue = deque([start])
        seen[start] = True
        members = []
        while queue:
            v = queue.popleft()
            members.append(v)
            for w in np.flatnonzero(a[v]):
                if not seen[w]:
                    seen[w] = True
                    queue.append(int(w))
        components.append(members)
    return components


def degree_centrality(adjacency: np.ndarray) -> np.ndarray:
    """Degree divided by n-1 (zeros for a single-node graph)."""
    a = _validated(adjacency)
    n = a.shape[0]
    deg = a.sum(axis=1).astype(np.float64)
    if n <= 1:
        return np.zeros(n)
    return deg / (n - 1)


def closeness_centrality(adjacency: np.ndarray) -> np.ndarray:
    """Per-component closeness: (component size - 1) / sum of distances.

    Scoping distances to the node's own component keeps the score in [0, 1]
    on disconnected graphs; isolated nodes score zero.
    """
    a = _validated(adjacency)
    n = a.shape[0]
    cc = np.zeros(n)
    for component in connected_components(a):
        size = len(component)
        if size < 2:
            continue
        inside = set(component)
        for v in component:
            # BFS distances within the component
            dist = {v: 0}
            queue = deque([v])
            while queue:
                u = queue.popleft()
                for w in np.flatnonzero(a[u]):
                    w = int(w)
                    if w in inside and w not in dist:
                        dist[w] = dist[u] + 1
                        queue.append(w)
            total = sum(dist.values())
            if total > 0:
                cc[v] = (size - 1) / total
    return cc


def betweenness_centrality(adjacency: np.ndarray) -> np.ndarray:
    """Shortest-path betweenness (Brandes accumulation), normalized to [0, 1].

    Undirected pair counts are halved and divided by (n-1)(n-2)/2; graphs with
    fewer than three nodes have no interior pairs and score zero everywhere.
    """
    a = _validated(adjacency)
    n = a.shape[0]
    bc = np.zeros(n)
    if n < 3:
        return bc
    neighbors = [np.flatnonzero(a[v]).tolist() for v in range(n)]
    for s in range(n):
        stack: list[int] = []
        predecessors: list[list[int]] = [[] for _ in range(n)]
        sigma = np.zeros(n)
        sigma[s] = 1.0
        dist = np.full(n, -1)
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in neighbors[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    predecessors[w].append(v)
        delta = np.zeros(n)
        while stack:
            w = stack.pop()
            for v in predecessors[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    bc /= 2.0  # each unordered pair was counted from both endpoints
    bc /= (n - 1) * (n - 2) / 2.0
    return bc


def eigenvector_centrality(
    adjacency: np.ndarray, tol: float = 1e-10, max_iterations: int = 10000
) -> np.ndarray:
    """Leading-eigenvector scores scaled so the largest equals one.

    Power iteration runs on A + I, which shares eigenvectors with A but keeps
    the iteration from oscillating on bipartite structures. Isolated nodes
    score zero, and an edgeless graph scores zero everywhere.
    """
    a = _validated(adjacency).astype(np.float64)
    n = a.shape[0]
    if n == 0:
        return np.zeros(0)
    degrees = a.sum(axis=1)
    if not np.any(degrees > 0):
        return np.zeros(n)
    shifted = a + np.eye(n)
    vec = np.full(n, 1.0 / np.sqrt(n))
    for _ in range(max_iterations):
        nxt = shifted @ vec
        norm = np.linalg.norm(nxt)
        if norm == 0:
            return np.zeros(n)
        nxt /= norm
        if np.abs(nxt - vec).max() < tol:
            vec = nxt
            break
        vec = nxt
    vec = np.abs(vec)
    vec[degrees == 0] = 0.0
    top = vec.max()
    if top > 0:
        vec = vec / top
    return vec


def clustering_coefficients(adjacency: np.ndarray) -> np.ndarray:
    """Fraction of realized triangles among each node's neighbor pairs."""
    a = _validated(adjacency).astype(np.float64)
    n = a.shape[0]
    coefficients = np.zeros(n)
    triangle_paths = a @ a @ a  # diagonal counts closed 3-walks = 2 * triangles
    degrees = a.sum(axis=1)
    for v in range(n):
        d = degrees[v]
        if d >= 2:
            coefficients[v] = triangle_paths[v, v] / (d * (d - 1))
    return coefficients


def compute_centralities(adjacency: np.ndarray, node_ids: tuple[str, ...]) -> CentralityVector:
    """All centrality vectors for one adjacency matrix."""
    a = _validated(adjacency)
    if a.shape[0] != len(node_ids):
        raise ValueError("node_ids must match the adjacency size")
    return CentralityVector(
        node_ids=tuple(node_ids),
        degree=degree_centrality(a),
        closeness=closeness_centrality(a),
        betweenness=betweenness_centrality(a),
        eigenvector=eigenvector_centrality(a),
        clustering=clustering_coefficients(a),
    )
