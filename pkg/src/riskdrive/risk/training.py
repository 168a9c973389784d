"""Generate (behavior score, risk parameter) training pairs from rollouts.

Each grid value of the risk parameter drives a planner-controlled agent
through seeded traffic across a spread of densities and lane counts; the
agent's behavior score is then measured from its trajectory exactly the way
it would be for a live driver. Grid points whose games break down are
dropped with a warning.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..behavior.metrics import cmetric_scalar, compute_profile
from ..game.planner import PlannerConfig
from ..graph import DEFAULT_MU, GraphHistory
from ..sim.params import ScenarioConfig
from ..sim.trajectory import Trajectory

log = logging.getLogger(__name__)

DEFAULT_THETA_GRID = tuple(np.round(np.arange(-5.0, 5.01, 0.5), 2))


@dataclass(frozen=True)
class TrainingConfig:
    theta_grid: tuple[float, ...] = DEFAULT_THETA_GRID
    densities: tuple[int, ...] = (8, 12, 16)  # vehicles per scenario
    lane_counts: tuple[int, ...] = (2, 3, 4)
    duration: float = 20.0
    seed: int = 0
    mu: float = DEFAULT_MU
    ego_desired_speed: float = 32.0
    traffic_speed: float = 22.0  # stationary pack keeps the graph connected


def behavior_score_of_trajectory(
    trajectory: Trajectory, agent_id: int, mu: float = DEFAULT_MU
) -> float:
    """Behavior score of one agent from a recorded trajectory."""
    frames = trajectory.positions_by_frame()
    ticks = sorted(frames)
    if len(ticks) < 3:
        raise ValueError("trajectory too short to score")
    history = GraphHistory(mu=mu, reset_capacity=10_000)
    for t in ticks:
        ids = sorted(frames[t])
        history.append([frames[t][i] for i in ids], ids=ids)
    times = sorted({r.time_s for r in trajectory.rows})
    dt = times[1] - times[0] if len(times) > 1 else 1.0
    profile = compute_profile(history, agent_id, dt=dt)
    return cmetric_scalar(profile)


def generate_training_set(
    training: TrainingConfig = TrainingConfig(),
    planner_config: PlannerConfig | None = None,
) -> list[tuple[float, float]]:
    """Roll the grid and return (score, theta) pairs, deterministic per seed."""
    from ..experiments.scenarios import EGO_ID, drive_with_planner

    planner_config = planner_config or PlannerConfig()
    pairs: list[tuple[float, float]] = []
    for theta in training.theta_grid:
        for density in training.densities:
            for lanes in training.lane_counts:
                config = ScenarioConfig(
                    n_lanes=lanes,
                    n_vehicles=density,
                    seed=training.seed + density * 31 + lanes * 7,
                    duration=training.duration,
                    class_mix=0.0,
                    road_length_m=60.0 + 30.0 * density / lanes,
                    min_spawn_spacing_m=25.0,
                )
                result = drive_with_planner(
                    config,
                    planner_config,
                    theta_ego=theta,
                    ego_desired_speed=training.ego_desired_speed,
                    uniform_traffic_speed=training.traffic_speed,
                )
                if result.planner_fallbacks > 0:
                    log.warning(
                        "dropping grid point theta=%.2f (density=%d lanes=%d): "
                        "neurotic breakdown during planning",
                        theta,
                        density,
                        lanes,
                    )
                    continue
                score = behavior_score_of_trajectory(
                    result.trajectory, EGO_ID, mu=training.mu
                )
                pairs.append((score, float(theta)))
    return pairs
