"""Behavior-score-to-risk calibration: OLS mapping, clustering, training."""

from .clustering import CLUSTER_LABELS, RiskClusters, cluster
from .mapping import RiskMapping, THETA_BOUNDS, fit, map_to_theta
from .training import TrainingConfig, behavior_score_of_trajectory, generate_training_set

__all__ = [
    "CLUSTER_LABELS",
    "RiskClusters",
    "RiskMapping",
    "THETA_BOUNDS",
    "TrainingConfig",
    "behavior_score_of_trajectory",
    "cluster",
    "fit",
    "generate_training_set",
    "map_to_theta",
]
