import math

import numpy as np
import pytest

from riskdrive.sim import DriverParams, Neighbor, Neighborhood, VehicleState, VEHICLE_LENGTH
from riskdrive.sim.mobil import (
    CHANGE_LEFT,
    CHANGE_RIGHT,
    STAY,
    incentive_gain,
    lane_change_safe,
    mobil_decide,
)


def make_params(**kw):
    base = dict(v0=25.0, T_headway=1.5, s0=2.0, a_max=1.0, b_comf=2.0,
                p=0.5, b_safe=4.0, delta_a_th=0.2)
    base.update(kw)
    return DriverParams(**base)


def vehicle(vid, x, lane, v):
    return VehicleState(id=vid, x=x, y=lane * 4.0, lane=lane, v=v)


def gap_for_accel(v, params, target_accel):
    """Bumper gap making a follower at speed v (leader at same speed) brake
    at exactly target_accel; solved from the braking ratio by hand."""
    s_star = params.s0 + v * params.T_headway
    ratio_sq = 1.0 - (v / params.v0) ** 4 - target_accel / params.a_max
    return s_star / math.sqrt(ratio_sq)


def test_safety_violation_forces_stay():
    p = make_params()
    ego = vehicle(0, 100.0, 0, 25.0)
    # follower tuned so its post-change deceleration is exactly -b_safe - 0.1
    gap = gap_for_accel(25.0, p, -p.b_safe - 0.1)
    follower = vehicle(1, ego.x - gap - VEHICLE_LENGTH, 1, 25.0)
    hood = Neighborhood(left_follower=Neighbor(follower, p), has_left=True)
    assert not lane_change_safe(ego, p, hood.left_follower)
    assert mobil_decide(ego, p, hood) == STAY


def test_safety_boundary_is_inclusive():
    p = make_params()
    ego = vehicle(0, 100.0, 0, 25.0)
    gap = gap_for_accel(25.0, p, -p.b_safe)
    follower = vehicle(1, ego.x - gap - VEHICLE_LENGTH, 1, 25.0)
    assert lane_change_safe(ego, p, Neighbor(follower, p))


def test_egoistic_gain_above_threshold_changes():
    # ego at v0 behind a leader tuned to cost it exactly 0.3 of acceleration;
    # empty left lane restores free road: gain 0.3 > threshold 0.2 at p=0.
    p = make_params(p=0.0)
    ego = vehicle(0, 100.0, 0, 25.0)
    gap = gap_for_accel(25.0, p, -0.3)
    leader = vehicle(1, ego.x + gap + VEHICLE_LENGTH, 0, 25.0)
    hood = Neighborhood(leader=Neighbor(leader, p), has_left=True)
    assert incentive_gain(ego, p, hood, None, None) == pytest.approx(0.3, abs=1e-12)
    assert mobil_decide(ego, p, hood) == CHANGE_LEFT


def test_polite_driver_respects_neighbor_losses():
    # same 0.3 ego gain, but the new follower would lose 0.5; at p=1 the
    # total 0.3 - 0.5 = -0.2 misses the 0.1 threshold.
    p = make_params(p=1.0, delta_a_th=0.1)
    ego = vehicle(0, 100.0, 0, 25.0)
    lead_gap = gap_for_accel(25.0, p, -0.3)
    leader = vehicle(1, ego.x + lead_gap + VEHICLE_LENGTH, 0, 25.0)
    foll_gap = gap_for_accel(25.0, p, -0.5)
    follower = vehicle(2, ego.x - foll_gap - VEHICLE_LENGTH, 1, 25.0)
    hood = Neighborhood(
        leader=Neighbor(leader, p),
        left_follower=Neighbor(follower, p),
        has_left=True,
    )
    gain = incentive_gain(ego, p, hood, None, hood.left_follower)
    assert gain == pytest.approx(-0.2, abs=1e-12)
    assert mobil_decide(ego, p, hood) == STAY


def test_left_preferred_over_right_on_tie():
    p = make_params(p=0.0)
    ego = vehicle(0, 100.0, 0, 25.0)
    gap = gap_for_accel(25.0, p, -0.5)
    leader = vehicle(1, ego.x + gap + VEHICLE_LENGTH, 0, 25.0)
    hood = Neighborhood(leader=Neighbor(leader, p), has_left=True, has_right=True)
    assert mobil_decide(ego, p, hood) == CHANGE_LEFT


def test_right_taken_when_left_fails():
    p = make_params(p=0.0)
    ego = vehicle(0, 100.0, 1, 25.0)
    gap = gap_for_accel(25.0, p, -0.5)
    leader = vehicle(1, ego.x + gap + VEHICLE_LENGTH, 1, 25.0)
    blocker = vehicle(2, ego.x - 0.5 - VEHICLE_LENGTH, 2, 25.0)  # unsafe left follower
    hood = Neighborhood(
        leader=Neighbor(leader, p),
        left_follower=Neighbor(blocker, p),
        has_left=True,
        has_right=True,
    )
    assert mobil_decide(ego, p, hood) == CHANGE_RIGHT


def test_mandatory_change_still_gated_by_safety():
    p = make_params()
    ego = vehicle(0, 100.0, 0, 25.0)
    blocker = vehicle(1, ego.x - 0.5 - VEHICLE_LENGTH, 1, 30.0)
    hood = Neighborhood(left_follower=Neighbor(blocker, p), has_left=True)
    assert mobil_decide(ego, p, hood, mandatory_left=True) == STAY
    free = Neighborhood(has_left=True)
    assert mobil_decide(ego, p, free, mandatory_left=True) == CHANGE_LEFT


def test_politeness_monotonicity_on_random_neighborhoods():
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(300):
        v = rng.uniform(10, 35)
        ego = vehicle(0, 100.0, 0, v)
        entries = {}
        if rng.random() < 0.8:
            entries["leader"] = Neighbor(
                vehicle(1, ego.x + rng.uniform(6, 60), 0, rng.uniform(10, 35)),
                make_params(p=0.0),
            )
        if rng.random() < 0.8:
            entries["left_follower"] = Neighbor(
                vehicle(2, ego.x - rng.uniform(6, 60), 1, rng.uniform(10, 35)),
                make_params(p=0.0),
            )
        if rng.random() < 0.5:
            entries["left_leader"] = Neighbor(
                vehicle(3, ego.x + rng.uniform(6, 60), 1, rng.uniform(10, 35)),
                make_params(p=0.0),
            )
        if rng.random() < 0.5:
            entries["follower"] = Neighbor(
                vehicle(4, ego.x - rng.uniform(6, 60), 0, rng.uniform(10, 35)),
                make_params(p=0.0),
            )
        hood = Neighborhood(has_left=True, **entries)
        p_lo, p_hi = sorted(rng.uniform(0, 1, size=2))
        params_lo = make_params(p=p_lo)
        params_hi = make_params(p=p_hi)
        gain_lo = incentive_gain(ego, params_lo, hood, hood.left_leader, hood.left_follower)
        gain_hi = incentive_gain(ego, params_hi, hood, hood.left_leader, hood.left_follower)
        ego_only = incentive_gain(ego, make_params(p=0.0), hood, hood.left_leader, hood.left_follower)
        neighbor_term = gain_lo - ego_only
        if neighbor_term < 0 and gain_lo <= params_lo.delta_a_th:
            checked += 1
            assert gain_hi <= params_hi.delta_a_th
    assert checked > 20
