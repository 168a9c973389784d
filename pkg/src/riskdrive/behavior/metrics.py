"""Behavior profiles: SLE/SIE series and the scalar behavior score.

The scalar score of a window is the maximum style-likelihood (absolute rate
of change) of the closeness series: sharp closeness swings are what
overtaking, weaving and sudden approaches produce, while lane-keeping at
matched speed leaves closeness nearly constant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .centrality import closeness_series, degree_series, eigenvector_series
from ..graph.temporal import GraphHistory

CENTRALITY_KINDS = ("closeness", "degree", "eigenvector")


def sle_sie(series, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Absolute first/second time derivatives of a centrality series.

    Central differences in the interior, one-sided at the boundaries, so the
    outputs keep the input length. Requires at least 3 samples.
    """
    z = np.asarray(series, dtype=float)
    if z.ndim != 1 or z.size < 3:
        raise ValueError("series must be 1-D with at least 3 samples")
    first = np.empty_like(z)
    first[1:-1] = (z[2:] - z[:-2]) / (2.0 * dt)
    first[0] = (z[1] - z[0]) / dt
    first[-1] = (z[-1] - z[-2]) / dt
    second = np.empty_like(z)
    second[1:-1] = (z[2:] - 2.0 * z[1:-1] + z[:-2]) / dt**2
    second[0] = (z[2] - 2.0 * z[1] + z[0]) / dt**2
    second[-1] = (z[-1] - 2.0 * z[-2] + z[-3]) / dt**2
    return np.abs(first), np.abs(second)


@dataclass
class BehaviorProfile:
    """Centrality, SLE and SIE series of one agent over a window of ticks."""

    agent_id: int
    window: tuple[int, int]  # [t0, t1] inclusive tick range
    dt: float
    zeta_c: np.ndarray
    zeta_d: np.ndarray
    zeta_e: np.ndarray
    sle: dict[str, np.ndarray] = field(default_factory=dict)
    sie: dict[str, np.ndarray] = field(default_factory=dict)

    def to_json(self) -> str:
        def ser(a):
            return [None if np.isnan(x) else float(x) for x in a]

        return json.dumps(
            {
                "agent_id": self.agent_id,
                "window": list(self.window),
                "dt": self.dt,
                "zeta_c": ser(self.zeta_c),
                "zeta_d": ser(self.zeta_d),
                "zeta_e": ser(self.zeta_e),
                "sle": {k: ser(v) for k, v in self.sle.items()},
                "sie": {k: ser(v) for k, v in self.sie.items()},
                "zeta_scalar": self.scalar_or_none(),
            }
        )

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())

    def scalar_or_none(self) -> float | None:
        try:
            return cmetric_scalar(self)
        except ValueError:
            return None


def compute_profile(
    history: GraphHistory,
    agent_id: int,
    dt: float,
    window: tuple[int, int] | None = None,
) -> BehaviorProfile:
    """Full behavior profile of one agent over ``window`` (defaults to all ticks)."""
    if not history.graphs:
        raise ValueError("history is empty")
    if window is None:
        window = (0, len(history.graphs) - 1)
    t0, t1 = window
    if not (0 <= t0 <= t1 < len(history.graphs)):
        raise ValueError(f"window {window} outside history of {len(history.graphs)} ticks")
    sl = slice(t0, t1 + 1)
    zc = closeness_series(history, agent_id)[sl]
    zd = degree_series(history, agent_id)[sl]
    ze = eigenvector_series(history, agent_id)[sl]
    profile = BehaviorProfile(
        agent_id=agent_id, window=window, dt=dt, zeta_c=zc, zeta_d=zd, zeta_e=ze
    )
    if zc.size >= 3:
        for kind, series in (("closeness", zc), ("degree", zd), ("eigenvector", ze)):
            profile.sle[kind], profile.sie[kind] = sle_sie(series, dt)
    return profile


def cmetric_scalar(profile: BehaviorProfile) -> float:
    """Scalar behavior score: max closeness SLE within the window."""
    sle = profile.sle.get("closeness")
    if sle is None or sle.size == 0:
        raise ValueError("profile window is empty or too short for SLE")
    if np.all(np.isnan(sle)):
        raise ValueError("closeness SLE is undefined over the whole window")
    return float(np.nanmax(sle))


def sle_argmax_frame(profile: BehaviorProfile) -> int:
    """Frame index of the closeness-SLE peak (earliest frame on ties)."""
    sle = profile.sle.get("closeness")
    if sle is None or sle.size == 0 or np.all(np.isnan(sle)):
        raise ValueError("closeness SLE is undefined over the window")
    idx = int(np.nanargmax(sle))
    return profile.window[0] + idx
