"""Affine map from behavior scores to risk parameters.

Ordinary least squares over (score, risk) training pairs. On data generated
by the planner the slope comes out negative: more aggressive driving (higher
score) corresponds to a lower, more risk-seeking parameter.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

THETA_BOUNDS = (-5.0, 5.0)  # matches the calibration grid; beyond it the
# solver's breakdown region begins


@dataclass
class RiskMapping:
    beta0: float
    beta1: float
    theta_bounds: tuple[float, float] = THETA_BOUNDS
    training_pairs: list[tuple[float, float]] = field(default_factory=list)

    def __call__(self, zeta: float) -> float:
        return self.map(zeta)[0]

    def map(self, zeta: float) -> tuple[float, bool]:
        """theta = beta1 * zeta + beta0, clamped into bounds.

        Returns (theta, clamped_flag).
        """
        raw = self.beta1 * zeta + self.beta0
        lo, hi = self.theta_bounds
        if raw < lo:
            return lo, True
        if raw > hi:
            return hi, True
        return raw, False

    def to_json(self) -> str:
        return json.dumps(
            {
                "beta0": self.beta0,
                "beta1": self.beta1,
                "bounds": list(self.theta_bounds),
                "training_pairs": [list(p) for p in self.training_pairs],
            }
        )

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def from_json(cls, text: str) -> "RiskMapping":
        raw = json.loads(text)
        return cls(
            beta0=raw["beta0"],
            beta1=raw["beta1"],
            theta_bounds=tuple(raw["bounds"]),
            training_pairs=[tuple(p) for p in raw["training_pairs"]],
        )

    @classmethod
    def read_json(cls, path: str | Path) -> "RiskMapping":
        return cls.from_json(Path(path).read_text())


def fit(pairs, theta_bounds: tuple[float, float] = THETA_BOUNDS) -> RiskMapping:
    """OLS fit of theta on zeta over (zeta_hat, theta_hat) pairs."""
    pairs = [(float(z), float(t)) for z, t in pairs]
    if len(pairs) < 2:
        raise ValueError("need at least two training pairs")
    zs = [z for z, _ in pairs]
    ts = [t for _, t in pairs]
    n = len(pairs)
    z_mean = sum(zs) / n
    t_mean = sum(ts) / n
    s_zz = sum((z - z_mean) ** 2 for z in zs)
    if s_zz == 0.0:
        raise ValueError("degenerate fit: all behavior scores identical")
    s_zt = sum((z - z_mean) * (t - t_mean) for z, t in pairs)
    beta1 = s_zt / s_zz
    beta0 = t_mean - beta1 * z_mean
    return RiskMapping(
        beta0=beta0, beta1=beta1, theta_bounds=theta_bounds, training_pairs=pairs
    )


def map_to_theta(mapping: RiskMapping, zeta: float) -> tuple[float, bool]:
    return mapping.map(zeta)
