"""MOBIL lane-change decisions.

A change to a target lane is made only when both hold:

* safety: the prospective new follower could still brake within the safe
  limit, ``a_target >= -b_safe``;
* incentive: the ego acceleration gain, politeness-weighted with the gain or
  loss of the two affected followers, exceeds the switching threshold,
  ``a~_ego - a_ego + p * (a~_n - a_n + a~_o - a_o) > delta_a_th``.

Left is evaluated before right; the first passing candidate wins.
"""

from __future__ import annotations

from dataclasses import dataclass

from .idm import LeadInfo, idm_acceleration_from_gap
from .params import DriverParams, VEHICLE_LENGTH
from .state import VehicleState

STAY = "stay"
CHANGE_LEFT = "change_left"
CHANGE_RIGHT = "change_right"


@dataclass(frozen=True)
class Neighbor:
    """A nearby vehicle together with its own driver parameters."""

    state: VehicleState
    params: DriverParams


@dataclass(frozen=True)
class Neighborhood:
    """Leaders/followers around the ego in the current and adjacent lanes.

    ``None`` entries mean "no such vehicle" and are treated as an infinite
    gap. ``has_left``/``has_right`` flag whether the adjacent lane exists at
    all (left = higher lane index).
    """

    leader: Neighbor | None = None
    follower: Neighbor | None = None
    left_leader: Neighbor | None = None
    left_follower: Neighbor | None = None
    right_leader: Neighbor | None = None
    right_follower: Neighbor | None = None
    has_left: bool = False
    has_right: bool = False


def _accel(follower: VehicleState, params: DriverParams, leader: VehicleState | None) -> float:
    if leader is None:
        return idm_acceleration_from_gap(follower.v, params, None)
    gap = leader.x - follower.x - VEHICLE_LENGTH
    return idm_acceleration_from_gap(
        follower.v, params, LeadInfo(gap=gap, closing_speed=follower.v - leader.v)
    )


def lane_change_safe(
    ego: VehicleState,
    params: DriverParams,
    target_follower: Neighbor | None,
    target_leader: Neighbor | None = None,
) -> bool:
    """Safety criterion: new follower's post-change acceleration >= -b_safe.

    Body overlap with either target-lane neighbor is always unsafe (the
    braking criterion is meaningless at non-positive gaps).
    """
    if target_leader is not None:
        if target_leader.state.x - ego.x - VEHICLE_LENGTH <= 0.0:
            return False
    if target_follower is None:
        return True
    if ego.x - target_follower.state.x - VEHICLE_LENGTH <= 0.0:
        return False
    a_target = _accel(target_follower.state, target_follower.params, ego)
    return a_target >= -params.b_safe


def incentive_gain(
    ego: VehicleState,
    params: DriverParams,
    hood: Neighborhood,
    target_leader: Neighbor | None,
    target_follower: Neighbor | None,
) -> float:
    """Politeness-weighted acceleration gain of a hypothetical change."""
    lead_state = hood.leader.state if hood.leader else None
    a_ego = _accel(ego, params, lead_state)
    a_ego_after = _accel(ego, params, target_leader.state if target_leader else None)
    gain = a_ego_after - a_ego
    if params.p > 0.0:
        neighbor_term = 0.0
        if target_follower is not None:
            n = target_follower
            a_n = _accel(n.state, n.params, target_leader.state if target_leader else None)
            a_n_after = _accel(n.state, n.params, ego)
            neighbor_term += a_n_after - a_n
        if hood.follower is not None:
            o = hood.follower
            a_o = _accel(o.state, o.params, ego)
            a_o_after = _accel(o.state, o.params, lead_state)
            neighbor_term += a_o_after - a_o
        gain += params.p * neighbor_term
    return gain


def evaluate_candidate(
    ego: VehicleState,
    params: DriverParams,
    hood: Neighborhood,
    target_leader: Neighbor | None,
    target_follower: Neighbor | None,
    mandatory: bool = False,
) -> bool:
    """Full MOBIL check for one target lane.

    ``mandatory`` skips the incentive criterion (used for merging vehicles
    whose lane is ending); the safety gate always applies.
    """
    if not lane_change_safe(ego, params, target_follower, target_leader):
        return False
    if mandatory:
        return True
    return incentive_gain(ego, params, hood, target_leader, target_follower) > params.delta_a_th


def mobil_decide(
    ego: VehicleState,
    params: DriverParams,
    hood: Neighborhood,
    mandatory_left: bool = False,
) -> str:
    """Decide stay/change_left/change_right for one tick.

    Left is tried first; ``mandatory_left`` marks an ending lane whose
    vehicles must leave as soon as the safety criterion allows.
    """
    if hood.has_left and evaluate_candidate(
        ego, params, hood, hood.left_leader, hood.left_follower, mandatory=mandatory_left
    ):
        return CHANGE_LEFT
    if hood.has_right and evaluate_candidate(
        ego, params, hood, hood.right_leader, hood.right_follower
    ):
        return CHANGE_RIGHT
    return STAY
