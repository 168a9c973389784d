"""Intelligent Driver Model longitudinal acceleration."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .params import DriverParams, VEHICLE_LENGTH

# Acceleration returned when the bumper-to-bumper gap is non-positive; the
# braking term of the model is undefined there, so the output is clamped to a
# bounded emergency value to keep the integrator stable.
EMERGENCY_FACTOR = 2.0


@dataclass(frozen=True)
class LeadInfo:
    """Gap and closing speed to a leading vehicle."""

    gap: float  # bumper-to-bumper distance (m)
    closing_speed: float  # v_ego - v_leader (m/s)


def desired_gap(v: float, closing_speed: float, params: DriverParams) -> float:
    """Desired minimum gap s*(v, dv) = s0 + v*T + v*dv / (2*sqrt(a*b))."""
    return (
        params.s0
        + v * params.T_headway
        + v * closing_speed / (2.0 * math.sqrt(params.a_max * params.b_comf))
    )


def idm_acceleration_from_gap(
    v: float, params: DriverParams, lead: LeadInfo | None = None
) -> float:
    """IDM acceleration given an explicit gap/closing-speed pair.

    With no leader only the free-road term a*(1 - (v/v0)^4) remains. A
    non-positive gap returns the emergency deceleration floor.
    """
    free = 1.0 - (v / params.v0) ** 4
    if lead is None:
        return params.a_max * free
    if lead.gap <= 0.0:
        return -EMERGENCY_FACTOR * params.b_comf
    ratio = desired_gap(v, lead.closing_speed, params) / lead.gap
    return params.a_max * (free - ratio * ratio)


def idm_acceleration(ego, params: DriverParams, leader=None) -> float:
    """IDM acceleration of ``ego`` behind an optional ``leader`` vehicle state.

    The gap is measured bumper to bumper (leader.x - ego.x - vehicle length).
    """
    if leader is None:
        return idm_acceleration_from_gap(ego.v, params, None)
    gap = leader.x - ego.x - VEHICLE_LENGTH
    return idm_acceleration_from_gap(
        ego.v, params, LeadInfo(gap=gap, closing_speed=ego.v - leader.v)
    )


def collision_imminent(ego, leader) -> bool:
    """True when the bumper-to-bumper gap to the leader is non-positive."""
    return leader is not None and (leader.x - ego.x - VEHICLE_LENGTH) <= 0.0
