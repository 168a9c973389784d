"""Per-tick geometric graphs over vehicle positions.

Vehicles closer than the threshold ``mu`` are connected. The adjacency
matrix stores raw Euclidean distances; the Laplacian keeps the degree
diagonal but exponential-kernel off-diagonals ``-exp(-d)``. Both are kept
as defined because downstream consumers read different matrices: the
eigenvector centrality works on the adjacency, the temporal update on the
Laplacian.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

EdgeSet = frozenset  # of (id_i, id_j) pairs with id_i < id_j


def _norm_pair(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class TrafficGraph:
    """Snapshot graph for one tick."""

    t: int
    ids: tuple[int, ...]  # agent id per vertex index
    positions: np.ndarray  # (N, 2)
    A: np.ndarray  # adjacency, raw distances below mu
    D: np.ndarray  # diagonal degree matrix, D[i, i] = sum_j A[i, j]
    L: np.ndarray  # degree diagonal, -exp(-d) off-diagonal
    mu: float
    seen_edges: EdgeSet = field(default_factory=frozenset)  # cumulative id pairs

    @property
    def n(self) -> int:
        return len(self.ids)

    def index_of(self, agent_id: int) -> int:
        return self.ids.index(agent_id)

    def current_edges(self) -> set[tuple[int, int]]:
        """Id pairs connected in this tick (distance strictly below mu)."""
        edges = set()
        n = self.n
        for i in range(n):
            for j in range(i + 1, n):
                if _distance(self.positions, i, j) < self.mu:
                    edges.add(_norm_pair(self.ids[i], self.ids[j]))
        return edges

    def neighbors_of(self, agent_id: int) -> list[int]:
        i = self.index_of(agent_id)
        out = []
        for j in range(self.n):
            if j != i and _distance(self.positions, i, j) < self.mu:
                out.append(self.ids[j])
        return out

    def to_json(self) -> str:
        """Debug/UI dump: {t, ids, edges: [[i, j, d], ...], mu}."""
        edges = []
        for i in range(self.n):
            for j in range(i + 1, self.n):
                d = _distance(self.positions, i, j)
                if d < self.mu:
                    edges.append([i, j, d])
        return json.dumps({"t": self.t, "ids": list(self.ids), "edges": edges, "mu": self.mu})


def _distance(positions: np.ndarray, i: int, j: int) -> float:
    return float(np.hypot(*(positions[i] - positions[j])))


def pairwise_distances(positions: np.ndarray) -> np.ndarray:
    diff = positions[:, None, :] - positions[None, :, :]
    return np.sqrt((diff**2).sum(axis=2))


def build_graph(
    positions,
    mu: float,
    t: int = 0,
    ids: tuple[int, ...] | None = None,
    prior_seen: EdgeSet | None = None,
) -> TrafficGraph:
    """Build the tick graph from 2-D positions.

    Coincident vertices (d = 0 < mu) count as connected: the adjacency entry
    is 0 (indistinguishable from no edge there), but the pair still enters
    ``seen_edges`` and contributes -1 to the Laplacian off-diagonal.
    """
    pos = np.asarray(positions, dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(pos)):
        raise ValueError("positions must be finite")
    if mu <= 0:
        raise ValueError("mu must be > 0")
    n = pos.shape[0]
    if ids is None:
        ids = tuple(range(n))
    else:
        ids = tuple(ids)
        if len(ids) != n:
            raise ValueError("ids length does not match positions")

    dist = pairwise_distances(pos)
    connected = (dist < mu) & ~np.eye(n, dtype=bool)
    A = np.where(connected, dist, 0.0)
    D = np.diag(A.sum(axis=1))
    L = np.where(connected, -np.exp(-dist), 0.0)
    np.fill_diagonal(L, np.diag(D))

    seen = set(prior_seen) if prior_seen else set()
    idx_i, idx_j = np.nonzero(np.triu(connected, 1))
    for i, j in zip(idx_i, idx_j):
        seen.add(_norm_pair(ids[int(i)], ids[int(j)]))

    return TrafficGraph(
        t=t, ids=ids, positions=pos, A=A, D=D, L=L, mu=mu, seen_edges=frozenset(seen)
    )
