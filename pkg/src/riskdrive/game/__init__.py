"""Risk-sensitive LQ dynamic games: solver, rollouts, receding-horizon planning."""

from .entropic import entropic_risk, gaussian_entropic_risk
from .rollout import RolloutResult, rollout, rollout_with_policies, trajectory_cost
from .solver import solve_nash, solve_nash_strict
from .types import (
    EquilibriumError,
    LQGame,
    NashSolution,
    NeuroticBreakdownError,
    game_from_json,
    game_to_json,
    load_game,
    save_game,
)

__all__ = [
    "EquilibriumError",
    "LQGame",
    "NashSolution",
    "NeuroticBreakdownError",
    "RolloutResult",
    "entropic_risk",
    "game_from_json",
    "game_to_json",
    "gaussian_entropic_risk",
    "load_game",
    "rollout",
    "rollout_with_policies",
    "save_game",
    "solve_nash",
    "solve_nash_strict",
    "trajectory_cost",
]
