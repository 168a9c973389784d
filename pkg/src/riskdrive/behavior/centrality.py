"""Centrality time series over a graph history.

Three per-agent series are computed from the tick graphs:

* closeness: (N-1) over the sum of shortest-path distances to all others,
  with unreachable pairs contributing a capped distance of ``10 * mu``;
* degree: cumulative count of distinct agents ever seen as neighbors
  (restarting when the temporal history resets);
* eigenvector: the agent's entry of the principal eigenvector of the
  tick adjacency, sign-fixed to non-negative and unit norm.

Absent entries (single-vehicle ticks) are NaN, never zero.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

from ..graph.geometric import TrafficGraph
from ..graph.temporal import GraphHistory

UNREACHABLE_CAP_FACTOR = 10.0


def shortest_path_sums(graph: TrafficGraph) -> np.ndarray:
    """Sum over j of the shortest-path distance from each vertex i.

    Edge weights are the Euclidean distances of the tick graph; pairs in
    different components count as ``10 * mu``.
    """
    n = graph.n
    cap = UNREACHABLE_CAP_FACTOR * graph.mu
    adjacency: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d = float(np.hypot(*(graph.positions[i] - graph.positions[j])))
            if d < graph.mu:
                adjacency[i].append((j, d))
                adjacency[j].append((i, d))
    sums = np.zeros(n)
    for src in range(n):
        dist = _dijkstra(adjacency, src, n)
        total = 0.0
        for j in range(n):
            if j == src:
                continue
            total += dist[j] if math.isfinite(dist[j]) else cap
        sums[src] = total
    return sums


def _dijkstra(adjacency, src: int, n: int) -> list[float]:
    dist = [math.inf] * n
    dist[src] = 0.0
    heap = [(0.0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, w in adjacency[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def closeness_centrality(graph: TrafficGraph) -> np.ndarray:
    """Per-vertex closeness for one tick; NaN when fewer than two vehicles."""
    n = graph.n
    if n < 2:
        return np.full(n, np.nan)
    sums = shortest_path_sums(graph)
    out = np.empty(n)
    for i in range(n):
        out[i] = (n - 1) / sums[i] if sums[i] > 0 else math.inf
    return out


def eigenvector_centrality(graph: TrafficGraph) -> np.ndarray:
    """Principal eigenvector of the tick adjacency, non-negative, unit norm.

    A zero adjacency has no principal direction; the all-equal unit vector is
    returned by convention.
    """
    n = graph.n
    if n == 0:
        return np.zeros(0)
    if not graph.A.any():
        return np.full(n, 1.0 / math.sqrt(n))
    eigvals, eigvecs = np.linalg.eigh(graph.A)
    vec = eigvecs[:, -1]
    if vec.sum() < 0:
        vec = -vec
    return vec


def closeness_series(history: GraphHistory, agent_id: int) -> np.ndarray:
    out = []
    for g in history.graphs:
        if agent_id not in g.ids:
            out.append(np.nan)
            continue
        out.append(closeness_centrality(g)[g.index_of(agent_id)])
    return np.array(out)


def degree_series(history: GraphHistory, agent_id: int) -> np.ndarray:
    """Cumulative distinct-neighbor counts, restarting at temporal resets."""
    if not history.graphs:
        raise ValueError("history is empty")
    resets = set(history.reset_ticks)
    seen: set[int] = set()
    out = []
    for g in history.graphs:
        if g.t in resets:
            seen = set()
        if agent_id in g.ids:
            seen.update(g.neighbors_of(agent_id))
        out.append(float(len(seen)))
    return np.array(out)


def eigenvector_series(history: GraphHistory, agent_id: int) -> np.ndarray:
    out = []
    for g in history.graphs:
        if agent_id not in g.ids:
            out.append(np.nan)
            continue
        out.append(eigenvector_centrality(g)[g.index_of(agent_id)])
    return np.array(out)
