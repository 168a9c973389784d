"""Temporal Laplacian maintenance across ticks.

The per-tick Laplacian is carried forward: the previous matrix is embedded
as the leading block, rows/columns for newly appeared vehicles are appended,
and only the entries that actually changed this tick are corrected. An edge
once observed is retained at its most recent in-threshold weight even after
the pair separates beyond ``mu``; the degree diagonal always reflects the
current tick. Once the vehicle count crosses ``reset_capacity`` the matrix
is reset to zero and the retention history restarts.
"""

from __future__ import annotations

import numpy as np

from .geometric import TrafficGraph, build_graph, _norm_pair


class GraphHistory:
    """Ordered tick graphs plus the incrementally maintained temporal Laplacian."""

    def __init__(self, mu: float, reset_capacity: int = 64):
        if reset_capacity < 1:
            raise ValueError("reset_capacity must be >= 1")
        self.mu = mu
        self.reset_capacity = reset_capacity
        self.graphs: list[TrafficGraph] = []
        self.temporal_L = np.zeros((0, 0))
        self.reset_ticks: list[int] = []
        self._index_of: dict[int, int] = {}  # agent id -> matrix index
        self._edge_weight: dict[tuple[int, int], float] = {}  # retained kernel weights
        self._seen: set[tuple[int, int]] = set()

    @property
    def t(self) -> int:
        return len(self.graphs) - 1

    def ids(self) -> tuple[int, ...]:
        return tuple(sorted(self._index_of, key=self._index_of.get))

    def append(self, positions, ids=None) -> TrafficGraph:
        """Build this tick's graph and fold it into the temporal Laplacian."""
        pos = np.asarray(positions, dtype=float).reshape(-1, 2)
        if ids is None:
            ids = tuple(range(pos.shape[0]))
        crossing = len(set(ids) | set(self._index_of)) > self.reset_capacity
        prior = None
        if self.graphs and not crossing:
            prior = self.graphs[-1].seen_edges
        graph = build_graph(pos, self.mu, t=len(self.graphs), ids=ids, prior_seen=prior)
        self.graphs.append(graph)
        update_laplacian(self, graph)
        return graph

    def seen_pairs(self) -> frozenset:
        return frozenset(self._seen)

    def _reset(self, graph: TrafficGraph) -> None:
        self._index_of = {agent_id: i for i, agent_id in enumerate(graph.ids)}
        self.temporal_L = np.zeros((graph.n, graph.n))
        self._edge_weight.clear()
        self._seen.clear()
        self.reset_ticks.append(graph.t)


def update_laplacian(history: GraphHistory, graph: TrafficGraph) -> np.ndarray:
    """Advance the temporal Laplacian by one tick graph.

    Returns the updated matrix (also stored on the history). The dimension
    may only grow between resets; crossing the capacity returns the zero
    matrix for this tick and restarts accumulation on the next one.
    """
    missing = [a for a in history._index_of if a not in graph.ids]
    if missing:
        raise ValueError(f"graph dimension may not shrink between resets (lost {missing})")

    if len(set(graph.ids) | set(history._index_of)) > history.reset_capacity:
        history._reset(graph)
        return history.temporal_L

    n_prev = history.temporal_L.shape[0]
    for agent_id in graph.ids:
        if agent_id not in history._index_of:
            history._index_of[agent_id] = len(history._index_of)
    n = len(history._index_of)

    # Embed the previous matrix as the leading block.
    M = np.zeros((n, n))
    M[:n_prev, :n_prev] = history.temporal_L

    # Off-diagonal corrections: new or re-weighted edges only.
    idx = history._index_of
    for id_i, id_j in graph.current_edges():
        pair = _norm_pair(id_i, id_j)
        d = float(
            np.hypot(
                *(
                    graph.positions[graph.index_of(id_i)]
                    - graph.positions[graph.index_of(id_j)]
                )
            )
        )
        w = -np.exp(-d)
        history._seen.add(pair)
        if history._edge_weight.get(pair) != w:
            history._edge_weight[pair] = w
            i, j = idx[pair[0]], idx[pair[1]]
            M[i, j] = w
            M[j, i] = w

    # Degree diagonal follows the current tick.
    for vert, agent_id in enumerate(graph.ids):
        i = idx[agent_id]
        deg = graph.D[vert, vert]
        if M[i, i] != deg:
            M[i, i] = deg

    history.temporal_L = M
    return M
