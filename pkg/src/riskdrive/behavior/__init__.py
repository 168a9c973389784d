"""Driver behavior scoring from trajectory graphs."""

from .annotations import AnnotationSet, expected_aggressive_frame, frame_counters, tde
from .centrality import (
    closeness_centrality,
    closeness_series,
    degree_series,
    eigenvector_centrality,
    eigenvector_series,
    shortest_path_sums,
)
from .metrics import (
    BehaviorProfile,
    cmetric_scalar,
    compute_profile,
    sle_argmax_frame,
    sle_sie,
)

__all__ = [
    "AnnotationSet",
    "BehaviorProfile",
    "closeness_centrality",
    "closeness_series",
    "cmetric_scalar",
    "compute_profile",
    "degree_series",
    "eigenvector_centrality",
    "eigenvector_series",
    "expected_aggressive_frame",
    "frame_counters",
    "shortest_path_sums",
    "sle_argmax_frame",
    "sle_sie",
    "tde",
]
