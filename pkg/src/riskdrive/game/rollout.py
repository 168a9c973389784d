"""Closed-loop Monte-Carlo rollouts of a solved game."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entropic import entropic_risk
from .types import LQGame, NashSolution


@dataclass
class RolloutResult:
    states: np.ndarray  # (n_samples, T+1, n)
    controls: list[np.ndarray]  # per player (n_samples, T, m_i)
    costs: np.ndarray  # (N, n_samples) realized quadratic costs
    empirical_risk: np.ndarray  # (N,) entropic risk of the cost samples


def _noise_transform(W: np.ndarray) -> np.ndarray:
    """Square root of a PSD covariance via its eigendecomposition."""
    vals, vecs = np.linalg.eigh(W)
    vals = np.clip(vals, 0.0, None)
    return vecs * np.sqrt(vals)


def trajectory_cost(game: LQGame, player: int, xs: np.ndarray, us: list[np.ndarray]) -> float:
    """Realized finite-horizon cost of one trajectory for one player."""
    i = player
    total = 0.0
    for t in range(game.horizon):
        x = xs[t]
        total += 0.5 * float(x @ game.Q[i][t] @ x) + float(game.l[i][t] @ x)
        for j in range(game.n_players):
            u = us[j][t]
            total += 0.5 * float(u @ game.R[i][j][t] @ u)
    xT = xs[game.horizon]
    total += 0.5 * float(xT @ game.Q[i][game.horizon] @ xT) + float(game.l[i][game.horizon] @ xT)
    return total


def rollout_with_policies(
    game: LQGame,
    policies: list[tuple[np.ndarray, np.ndarray]],
    x0,
    noise_seed: int = 0,
    n_samples: int = 1,
) -> RolloutResult:
    """Simulate ``game``'s dynamics with explicit per-player affine policies.

    ``policies[i] = (K_i, k_i)`` applies u_t^i = -K_i[t] x - k_i[t]; policies
    may come from different solves (e.g. a mis-modeled opponent).
    """
    x0 = np.asarray(x0, dtype=float)
    T, N, n = game.horizon, game.n_players, game.state_dim
    rng = np.random.default_rng(noise_seed)
    roots = [_noise_transform(game.W[t]) for t in range(T)]

    states = np.zeros((n_samples, T + 1, n))
    controls = [np.zeros((n_samples, T, game.control_dims[i])) for i in range(N)]
    costs = np.zeros((N, n_samples))
    for s in range(n_samples):
        x = x0.copy()
        states[s, 0] = x
        for t in range(T):
            us = [-(K[t] @ x) - k[t] for K, k in policies]
            for i in range(N):
                controls[i][s, t] = us[i]
            w = roots[t] @ rng.standard_normal(n)
            x = game.A[t] @ x + sum(game.B[i][t] @ us[i] for i in range(N)) + w
            states[s, t + 1] = x
        sample_controls = [controls[j][s] for j in range(N)]
        for i in range(N):
            costs[i, s] = trajectory_cost(game, i, states[s], sample_controls)
    risks = np.array(
        [entropic_risk(game.thetas[i], costs[i]) for i in range(N)]
    )
    return RolloutResult(states=states, controls=controls, costs=costs, empirical_risk=risks)


def rollout(
    game: LQGame,
    solution: NashSolution,
    x0,
    noise_seed: int = 0,
    n_samples: int = 1,
) -> RolloutResult:
    """Simulate the closed loop under sampled process noise.

    With zero noise every sample is the same deterministic trajectory and
    the empirical risk equals the realized cost.
    """
    if solution.breakdown_flag:
        raise ValueError("cannot roll out a broken-down solution")
    policies = list(zip(solution.K, solution.k))
    return rollout_with_policies(game, policies, x0, noise_seed=noise_seed, n_samples=n_samples)
