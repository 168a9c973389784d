"""Risk-sensitive linear-quadratic game containers and JSON wire format."""

from __future__ import annotations

import json
from dataclasses import InitVar, dataclass, field
from pathlib import Path

import numpy as np


class NeuroticBreakdownError(RuntimeError):
    """Entropic risk diverged: |theta| is beyond the solvable range."""

    def __init__(self, message: str, timestep: int | None = None, player: int | None = None):
        super().__init__(message)
        self.timestep = timestep
        self.player = player


class EquilibriumError(RuntimeError):
    """The simultaneous best-response system is singular; no unique Nash stage solution."""


@dataclass
class LQGame:
    """Finite-horizon N-player LQ game with per-player entropic risk.

    Shapes (n = state dim, m_i = player i control dim, T = horizon):

    * ``A``: (T, n, n) transitions, ``B[i]``: (T, n, m_i) input maps
    * ``W``: (T, n, n) process noise covariances
    * ``Q[i]``: (T+1, n, n) state costs incl. terminal, ``l[i]``: (T+1, n)
    * ``R[i][j]``: (T, m_j, m_j) control costs, R[i][i] positive definite
    * ``thetas[i]``: risk parameter (negative seeking, positive averse)
    """

    A: np.ndarray
    B: list[np.ndarray]
    W: np.ndarray
    Q: list[np.ndarray]
    l: list[np.ndarray]
    R: list[list[np.ndarray]]
    thetas: np.ndarray
    validate: InitVar[bool] = True  # trusted in-process builders may skip

    def __post_init__(self, validate: bool = True) -> None:
        self.A = np.asarray(self.A, dtype=float)
        self.B = [np.asarray(b, dtype=float) for b in self.B]
        self.W = np.asarray(self.W, dtype=float)
        self.Q = [np.asarray(q, dtype=float) for q in self.Q]
        self.l = [np.asarray(v, dtype=float) for v in self.l]
        self.R = [[np.asarray(r, dtype=float) for r in row] for row in self.R]
        self.thetas = np.asarray(self.thetas, dtype=float)
        if validate:
            validate_game(self)

    @property
    def horizon(self) -> int:
        return self.A.shape[0]

    @property
    def n_players(self) -> int:
        return len(self.B)

    @property
    def state_dim(self) -> int:
        return self.A.shape[1]

    @property
    def control_dims(self) -> list[int]:
        return [b.shape[2] for b in self.B]

    @classmethod
    def time_invariant(cls, A, B, W, Q, l, R, thetas, horizon: int) -> "LQGame":
        """Broadcast single-step matrices over a horizon."""
        T = horizon
        rep = lambda M, k: np.repeat(np.asarray(M, dtype=float)[None], k, axis=0)
        return cls(
            A=rep(A, T),
            B=[rep(b, T) for b in B],
            W=rep(W, T),
            Q=[rep(q, T + 1) for q in Q],
            l=[rep(v, T + 1) for v in l],
            R=[[rep(r, T) for r in row] for row in R],
            thetas=thetas,
        )


def _check_symmetric(M: np.ndarray, name: str, tol: float = 1e-8) -> None:
    if not np.allclose(M, M.swapaxes(-1, -2), atol=tol):
        raise ValueError(f"{name} must be symmetric")


def _check_psd(M: np.ndarray, name: str, tol: float = 1e-9) -> None:
    eig = np.linalg.eigvalsh(M)
    if eig.min() < -tol:
        raise ValueError(f"{name} must be positive semidefinite (min eig {eig.min():.3e})")


def validate_game(game: LQGame) -> None:
    T, n = game.A.shape[0], game.A.shape[1]
    if game.A.shape != (T, n, n):
        raise ValueError("A must be (T, n, n)")
    if game.W.shape != (T, n, n):
        raise ValueError("W must match A's horizon and state dim")
    N = len(game.B)
    if not (len(game.Q) == len(game.l) == len(game.R) == len(game.thetas) == N):
        raise ValueError("per-player structures must agree on the player count")
    _check_symmetric(game.W, "W")
    _check_psd(game.W, "W")
    for i in range(N):
        if game.B[i].shape[:2] != (T, n):
            raise ValueError(f"B[{i}] must be (T, n, m_{i})")
        if game.Q[i].shape != (T + 1, n, n):
            raise ValueError(f"Q[{i}] must be (T+1, n, n)")
        if game.l[i].shape != (T + 1, n):
            raise ValueError(f"l[{i}] must be (T+1, n)")
        _check_symmetric(game.Q[i], f"Q[{i}]")
        _check_psd(game.Q[i], f"Q[{i}]")
        if len(game.R[i]) != N:
            raise ValueError("R must be an N x N table of (T, m_j, m_j) arrays")
        for j in range(N):
            m_j = game.B[j].shape[2]
            if game.R[i][j].shape != (T, m_j, m_j):
                raise ValueError(f"R[{i}][{j}] must be (T, m_{j}, m_{j})")
            _check_symmetric(game.R[i][j], f"R[{i}][{j}]")
        eig = np.linalg.eigvalsh(game.R[i][i])
        if eig.min() <= 0:
            raise ValueError(f"R[{i}][{i}] must be positive definite")


@dataclass
class NashSolution:
    """Affine feedback policies u_t^i = -K_t^i x_t - k_t^i plus value terms."""

    K: list[np.ndarray] | None  # per player (T, m_i, n)
    k: list[np.ndarray] | None  # per player (T, m_i)
    Z: list[np.ndarray] | None  # per player (T+1, n, n) value quadratics
    zeta: list[np.ndarray] | None  # per player (T+1, n) value linear terms
    c: np.ndarray | None  # (N, T+1) value constants
    breakdown_flag: bool = False
    breakdown_t: int | None = None
    breakdown_player: int | None = None

    def control(self, t: int, x: np.ndarray) -> list[np.ndarray]:
        if self.breakdown_flag:
            raise NeuroticBreakdownError(
                "solution broke down; no usable gains", self.breakdown_t, self.breakdown_player
            )
        return [-(Ki[t] @ x) - ki[t] for Ki, ki in zip(self.K, self.k)]

    def value(self, player: int, t: int, x: np.ndarray) -> float:
        """Player's risk-adjusted cost-to-go from state x at step t."""
        if self.breakdown_flag:
            raise NeuroticBreakdownError(
                "solution broke down; no value available", self.breakdown_t, self.breakdown_player
            )
        return float(
            0.5 * x @ self.Z[player][t] @ x + self.zeta[player][t] @ x + self.c[player][t]
        )


def game_to_json(game: LQGame) -> str:
    """Serialize all matrices (row-major nested lists) and the theta vector."""
    return json.dumps(
        {
            "horizon": game.horizon,
            "state_dim": game.state_dim,
            "control_dims": game.control_dims,
            "A": game.A.tolist(),
            "B": [b.tolist() for b in game.B],
            "W": game.W.tolist(),
            "Q": [q.tolist() for q in game.Q],
            "l": [v.tolist() for v in game.l],
            "R": [[r.tolist() for r in row] for row in game.R],
            "thetas": game.thetas.tolist(),
        }
    )


def game_from_json(text: str) -> LQGame:
    raw = json.loads(text)
    return LQGame(
        A=raw["A"],
        B=raw["B"],
        W=raw["W"],
        Q=raw["Q"],
        l=raw["l"],
        R=raw["R"],
        thetas=raw["thetas"],
    )


def save_game(game: LQGame, path: str | Path) -> None:
    Path(path).write_text(game_to_json(game))


def load_game(path: str | Path) -> LQGame:
    return game_from_json(Path(path).read_text())
