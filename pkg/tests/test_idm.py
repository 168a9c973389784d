import math

import numpy as np
import pytest

from riskdrive.sim import (
    DriverParams,
    LeadInfo,
    VehicleState,
    VEHICLE_LENGTH,
    idm_acceleration,
    idm_acceleration_from_gap,
)


def reference_idm(v, v0, s0, T, a, b, gap, dv):
    """Direct hand substitution into the acceleration formula."""
    s_star = s0 + v * T + v * dv / (2.0 * math.sqrt(a * b))
    return a * (1.0 - (v / v0) ** 4 - (s_star / gap) ** 2)


def make_params(**kw):
    base = dict(v0=25.0, T_headway=1.5, s0=2.0, a_max=1.0, b_comf=2.0,
                p=0.5, b_safe=4.0, delta_a_th=0.2)
    base.update(kw)
    return DriverParams(**base)


def test_free_road_equilibrium_is_exact_zero():
    p = make_params()
    ego = VehicleState(id=0, x=0.0, y=0.0, lane=0, v=p.v0)
    assert idm_acceleration(ego, p, None) == 0.0


def test_standstill_free_road_gives_a_max():
    p = make_params()
    ego = VehicleState(id=0, x=0.0, y=0.0, lane=0, v=0.0)
    assert idm_acceleration(ego, p, None) == p.a_max


def test_derived_example_matches_hand_substitution():
    # frozen from reference_idm(20, 25, 2, 1.5, 1, 2, 30, 5)
    p = make_params()
    out = idm_acceleration_from_gap(20.0, p, LeadInfo(gap=30.0, closing_speed=5.0))
    assert out == pytest.approx(-4.450424110885503, abs=1e-12)
    assert out == pytest.approx(reference_idm(20, 25, 2, 1.5, 1, 2, 30, 5), abs=1e-15)


def test_leader_form_uses_bumper_gap():
    p = make_params()
    ego = VehicleState(id=0, x=100.0, y=0.0, lane=0, v=20.0)
    leader = VehicleState(id=1, x=135.0 + VEHICLE_LENGTH, y=0.0, lane=0, v=15.0)
    expect = idm_acceleration_from_gap(20.0, p, LeadInfo(gap=35.0, closing_speed=5.0))
    assert idm_acceleration(ego, p, leader) == expect


def test_nonpositive_gap_returns_emergency_floor():
    p = make_params()
    out = idm_acceleration_from_gap(10.0, p, LeadInfo(gap=0.0, closing_speed=0.0))
    assert out == -2.0 * p.b_comf
    out = idm_acceleration_from_gap(10.0, p, LeadInfo(gap=-3.0, closing_speed=2.0))
    assert out == -2.0 * p.b_comf


def test_sign_structure_no_leader():
    p = make_params()
    fast = VehicleState(id=0, x=0, y=0, lane=0, v=p.v0 * 1.2)
    slow = VehicleState(id=1, x=0, y=0, lane=0, v=p.v0 * 0.8)
    assert idm_acceleration(fast, p, None) < 0
    assert idm_acceleration(slow, p, None) > 0


def test_random_points_match_reference_formula():
    rng = np.random.default_rng(7)
    for _ in range(200):
        v0 = rng.uniform(10, 45)
        p = make_params(
            v0=v0,
            T_headway=rng.uniform(0.5, 2.5),
            s0=rng.uniform(0.5, 5.0),
            a_max=rng.uniform(0.5, 3.0),
            b_comf=rng.uniform(1.0, 5.0),
        )
        v = rng.uniform(0, v0 * 1.5)
        gap = rng.uniform(1.0, 150.0)
        dv = rng.uniform(-10, 10)
        got = idm_acceleration_from_gap(v, p, LeadInfo(gap=gap, closing_speed=dv))
        want = reference_idm(v, p.v0, p.s0, p.T_headway, p.a_max, p.b_comf, gap, dv)
        assert got == pytest.approx(want, abs=1e-12)


def test_gap_monotonicity():
    p = make_params()
    rng = np.random.default_rng(3)
    for _ in range(100):
        v = rng.uniform(0, 30)
        dv = rng.uniform(-5, 5)
        gaps = np.sort(rng.uniform(0.5, 120, size=2))
        a_small = idm_acceleration_from_gap(v, p, LeadInfo(gap=gaps[0], closing_speed=dv))
        a_big = idm_acceleration_from_gap(v, p, LeadInfo(gap=gaps[1], closing_speed=dv))
        assert a_small <= a_big + 1e-15


def test_param_validation():
    with pytest.raises(ValueError):
        make_params(v0=-1.0)
    with pytest.raises(ValueError):
        make_params(p=1.5)
    with pytest.raises(ValueError):
        make_params(delta_a_th=-0.1)
