"""Entropic risk functional over cost samples."""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

from .types import NeuroticBreakdownError


def entropic_risk(theta: float, cost_samples) -> float:
    """(1/theta) * log mean(exp(theta * cost)), with theta = 0 giving the mean.

    Evaluated through log-sum-exp so large positive costs do not overflow;
    if the functional is still non-finite the risk parameter is outside the
    solvable range ("neurotic breakdown").
    """
    samples = np.asarray(cost_samples, dtype=float).ravel()
    if samples.size == 0:
        raise ValueError("cost_samples is empty")
    if not np.all(np.isfinite(samples)):
        raise ValueError("cost_samples must be finite")
    if theta == 0.0:
        return float(samples.mean())
    with np.errstate(over="ignore"):
        value = (logsumexp(theta * samples) - np.log(samples.size)) / theta
    if not np.isfinite(value):
        raise NeuroticBreakdownError(
            f"entropic risk diverged at theta={theta}; neurotic breakdown"
        )
    return float(value)


def gaussian_entropic_risk(theta: float, mean: float, var: float) -> float:
    """Closed form for Gaussian costs: mean + theta * var / 2."""
    return mean + theta * var / 2.0
