import json

import numpy as np
import pytest

from riskdrive.behavior.metrics import cmetric_scalar, compute_profile
from riskdrive.graph import GraphHistory
from riskdrive.service.session import (
    HUMAN_ID,
    SessionConfig,
    SessionManager,
    create_session,
    session_tick,
)
from riskdrive.sim import ScenarioConfig, Trajectory


def small_session_config(seed=0, planner=True, n_vehicles=6):
    return SessionConfig(
        scenario=ScenarioConfig(
            n_lanes=3,
            n_vehicles=n_vehicles,
            seed=seed,
            duration=10.0,
            class_mix=0.0,
            road_length_m=300.0,
            min_spawn_spacing_m=30.0,
        ),
        include_planner_agent=planner,
    )


def test_idle_session_emits_state_every_tick():
    state = create_session(small_session_config())
    for k in range(10):
        frame = session_tick(state)
        assert frame["type"] == "state"
        assert frame["v"] == 1
        assert frame["tick"] == k + 1
        dt = state.config.scenario.tick_dt
        assert frame["sim_time_s"] == pytest.approx((k + 1) * dt)
        ids = [v["id"] for v in frame["vehicles"]]
        assert HUMAN_ID in ids


def test_controls_map_to_bounded_offsets():
    config = small_session_config(planner=False)
    idle = create_session(config)
    pushed = create_session(config)
    for k in range(15):
        session_tick(idle)
        session_tick(pushed, [{"action": "accelerate", "seq": k}])
    v_idle = idle.world.vehicle(HUMAN_ID).v
    v_pushed = pushed.world.vehicle(HUMAN_ID).v
    assert v_pushed > v_idle


def test_at_most_once_per_seq():
    config = small_session_config(planner=False)
    once = create_session(config)
    twice = create_session(config)
    session_tick(once, [{"action": "accelerate", "seq": 1}])
    session_tick(twice, [{"action": "accelerate", "seq": 1}, {"action": "accelerate", "seq": 1}])
    assert once.world.vehicle(HUMAN_ID).v == twice.world.vehicle(HUMAN_ID).v
    # the same seq re-sent on a later tick is also dropped
    v_before = twice.world.vehicle(HUMAN_ID).v
    frame = session_tick(twice, [{"action": "accelerate", "seq": 1}])
    idle = session_tick(once)
    assert twice.world.vehicle(HUMAN_ID).v == once.world.vehicle(HUMAN_ID).v


def test_invalid_control_rejected_but_tick_proceeds():
    state = create_session(small_session_config(planner=False))
    frame = session_tick(state, [{"action": "warp", "seq": 0}])
    assert frame["tick"] == 1
    errors = [e for e in frame["events"] if e.get("kind") == "control_error"]
    assert errors and errors[0]["errors"][0]["code"] == "invalid_control"


def test_unsafe_lane_request_emits_rejected_event():
    from riskdrive.sim import VehicleState, World

    state = create_session(small_session_config(planner=False))
    # replace the traffic with a single hot follower boxing the human in
    config = state.config.scenario
    human = state.world.vehicle(HUMAN_ID)
    blocker = VehicleState(id=1, x=human.x - 7.0, y=4.0, lane=1, v=35.0)
    state.world = World(
        config=config,
        vehicles=(human, blocker),
        params={HUMAN_ID: state.world.params[HUMAN_ID], 1: config.driver_params("aggressive")},
    )
    frame = session_tick(state, [{"action": "lane_left", "seq": 0}])
    kinds = {e["kind"] for e in frame["events"]}
    assert "rejected_unsafe" in kinds
    assert "lane_change" not in kinds


def test_live_metrics_refresh_and_cluster_label():
    state = create_session(small_session_config())
    label = None
    for k in range(40):
        frame = session_tick(state)
        label = frame["metrics"]["cluster"]
    assert state.zeta is not None
    assert state.theta is not None
    assert label in (
        "very conservative", "conservative", "aggressive", "very aggressive",
    )


def test_aggressive_inputs_lower_theta_than_idle():
    config = small_session_config(planner=False)
    idle = create_session(config)
    wild = create_session(config)
    seq = 0
    for k in range(150):
        session_tick(idle)
        actions = [{"action": "accelerate", "seq": seq}]
        seq += 1
        if k % 30 == 10:
            actions.append({"action": "lane_left", "seq": seq})
            seq += 1
        elif k % 30 == 25:
            actions.append({"action": "lane_right", "seq": seq})
            seq += 1
        session_tick(wild, actions)
    assert wild.zeta > idle.zeta
    assert wild.theta < idle.theta


def test_online_matches_offline_recomputation():
    # the live score must equal an offline recomputation from the exported
    # trajectory over the same window
    manager = SessionManager()
    state = manager.start_session(small_session_config())
    rng = np.random.default_rng(3)
    seq = 0
    for k in range(75):
        actions = []
        if rng.random() < 0.4:
            actions.append({"action": rng.choice(["accelerate", "brake"]), "seq": seq})
            seq += 1
        session_tick(state, actions)
    live_zeta = state.zeta
    assert live_zeta is not None

    exports = manager.stop_session(state.session_id)
    trajectory = Trajectory.from_csv(exports["trajectory_csv"])
    frames = trajectory.positions_by_frame()
    window_ticks = sorted(frames)[-len(state.window):]
    history = GraphHistory(mu=state.config.mu, reset_capacity=10_000)
    for t in window_ticks:
        ids = sorted(frames[t])
        history.append([frames[t][i] for i in ids], ids=ids)
    profile = compute_profile(history, HUMAN_ID, dt=state.config.scenario.tick_dt)
    assert cmetric_scalar(profile) == pytest.approx(live_zeta, abs=1e-9)


def test_lifecycle_zero_ticks_and_double_stop():
    manager = SessionManager()
    state = manager.start_session(small_session_config())
    exports = manager.stop_session(state.session_id)
    assert exports["ticks"] == 0
    trajectory = Trajectory.from_csv(exports["trajectory_csv"])
    assert trajectory.frames() == [0]
    with pytest.raises(RuntimeError):
        manager.stop_session(state.session_id)
    with pytest.raises(KeyError):
        manager.stop_session("nope")


def test_concurrent_sessions_isolated():
    manager = SessionManager()
    a = manager.start_session(small_session_config(seed=1))
    b = manager.start_session(small_session_config(seed=2))
    manager.tick(a.session_id, [{"action": "accelerate", "seq": 0}])
    manager.tick(b.session_id)
    assert a.session_id != b.session_id
    assert a.world.vehicle(HUMAN_ID).v != b.world.vehicle(HUMAN_ID).v or (
        a.world.positions() != b.world.positions()
    )
