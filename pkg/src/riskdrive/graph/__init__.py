"""Dynamic geometric graphs over vehicle positions."""

from .geometric import TrafficGraph, build_graph, pairwise_distances
from .temporal import GraphHistory, update_laplacian
from .topology import laplacian_spectrum, vertex_topology

DEFAULT_MU = 50.0  # m, sensor-plausible neighborhood at highway speeds

__all__ = [
    "DEFAULT_MU",
    "GraphHistory",
    "TrafficGraph",
    "build_graph",
    "laplacian_spectrum",
    "pairwise_distances",
    "update_laplacian",
    "vertex_topology",
]
