"""Realtime driving sessions: fixed-tick world stepping with live scoring.

One human-controlled vehicle per session drives inside IDM traffic while a
planner-controlled agent reacts to the human's live risk estimate. The
behavior score refreshes once per second over a sliding 5 s window of
trajectory, through exactly the same scoring pipeline used offline, so the
live value matches an offline recomputation of the exported trajectory
bit for bit.
"""

from __future__ import annotations

import itertools
import uuid
from collections import deque
from dataclasses import dataclass, field, replace

from .protocol import PROTOCOL_VERSION
from ..behavior.metrics import compute_profile
from ..game.planner import PlannerConfig, RecedingHorizonPlanner
from ..graph import DEFAULT_MU, GraphHistory
from ..risk.clustering import CLUSTER_LABELS
from ..risk.mapping import RiskMapping
from ..sim.params import CLASS_EXTERNAL, ScenarioConfig
from ..sim.state import VehicleState
from ..sim.trajectory import Trajectory
from ..sim.world import ExternalControl, World, spawn_population, step
from ..experiments.scenarios import EGO_ID, insert_ego, vehicle_spec

HUMAN_ID = 500
WINDOW_S = 5.0
REFRESH_S = 1.0
CONTROL_OFFSET = 2.0  # m/s^2 per accelerate/brake key

# stock mapping/cluster geometry used until a calibration file is supplied
DEFAULT_MAPPING = RiskMapping(beta0=1.5, beta1=-85.0)
DEFAULT_CENTROIDS = (3.75, 1.25, -1.25, -3.75)


@dataclass
class SessionConfig:
    scenario: ScenarioConfig = field(default_factory=lambda: ScenarioConfig(n_vehicles=8))
    theta_ego: float = 1.0
    mapping: RiskMapping = field(default_factory=lambda: DEFAULT_MAPPING)
    centroids: tuple[float, ...] = DEFAULT_CENTROIDS
    mu: float = DEFAULT_MU
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    include_planner_agent: bool = True

    @classmethod
    def from_payload(cls, payload: dict) -> "SessionConfig":
        scenario_keys = set(ScenarioConfig.__dataclass_fields__)
        scenario_kwargs = {k: v for k, v in payload.items() if k in scenario_keys}
        scenario = ScenarioConfig(**scenario_kwargs) if scenario_kwargs else ScenarioConfig(n_vehicles=8)
        kwargs = {}
        if "theta_ego" in payload:
            kwargs["theta_ego"] = float(payload["theta_ego"])
        if "mapping" in payload:
            m = payload["mapping"]
            kwargs["mapping"] = RiskMapping(beta0=m["beta0"], beta1=m["beta1"])
        if "include_planner_agent" in payload:
            kwargs["include_planner_agent"] = bool(payload["include_planner_agent"])
        if "mu" in payload:
            kwargs["mu"] = float(payload["mu"])
        return cls(scenario=scenario, **kwargs)


def cluster_label_for(theta: float, centroids=DEFAULT_CENTROIDS) -> str:
    best = min(range(len(centroids)), key=lambda j: (theta - centroids[j]) ** 2)
    return CLUSTER_LABELS[best]


@dataclass
class SessionState:
    session_id: str
    config: SessionConfig
    world: World
    planner: RecedingHorizonPlanner | None
    window: deque  # of (tick, {agent_id: (x, y)})
    trajectory: Trajectory
    applied_seqs: set = field(default_factory=set)
    zeta: float | None = None
    theta: float | None = None
    cluster: str | None = None
    sle: float | None = None
    sie: float | None = None
    stopped: bool = False
    ego_control: ExternalControl = field(default_factory=lambda: ExternalControl(accel=0.0))

    @property
    def tick(self) -> int:
        return self.world.tick

    @property
    def window_ticks(self) -> int:
        return max(3, int(round(WINDOW_S / self.config.scenario.tick_dt)))

    @property
    def refresh_ticks(self) -> int:
        return max(1, int(round(REFRESH_S / self.config.scenario.tick_dt)))


def create_session(config: SessionConfig) -> SessionState:
    scenario = config.scenario
    world = spawn_population(scenario)
    human = VehicleState(
        id=HUMAN_ID,
        x=10.0,
        y=scenario.lane_center(0),
        lane=0,
        v=22.0,
        class_tag=CLASS_EXTERNAL,
    )
    params = dict(world.params)
    params[HUMAN_ID] = scenario.driver_params("conservative", v0=25.0)
    world = World(
        config=scenario,
        vehicles=world.vehicles + (human,),
        params=params,
    )
    planner = None
    if config.include_planner_agent:
        world = insert_ego(world, lane=min(1, scenario.n_lanes - 1), v=24.0)
        planner = RecedingHorizonPlanner(
            config.planner,
            theta_ego=config.theta_ego,
            desired_speed=30.0,
            lane_width=scenario.lane_width,
            n_lanes=scenario.n_lanes,
        )
    state = SessionState(
        session_id=uuid.uuid4().hex[:12],
        config=config,
        world=world,
        planner=planner,
        window=deque(maxlen=max(3, int(round(WINDOW_S / scenario.tick_dt)))),
        trajectory=Trajectory(metadata={"human_id": HUMAN_ID}),
    )
    state.trajectory.record(world)
    state.window.append((world.tick, world.positions()))
    return state


def _human_control(state: SessionState, controls: list[dict], errors: list[dict]) -> ExternalControl:
    offset = 0.0
    lane = None
    for control in controls:
        seq = control.get("seq")
        if seq in state.applied_seqs:
            continue  # at-most-once: duplicates are dropped
        action = control.get("action")
        if action == "accelerate":
            offset += CONTROL_OFFSET
        elif action == "brake":
            offset -= CONTROL_OFFSET
        elif action == "lane_left":
            lane = "left"
        elif action == "lane_right":
            lane = "right"
        else:
            errors.append({"code": "invalid_control", "action": action, "seq": seq})
            continue
        if seq is not None:
            state.applied_seqs.add(seq)
    offset = max(-CONTROL_OFFSET, min(CONTROL_OFFSET, offset))
    return ExternalControl(offset=offset, lane=lane)


def _refresh_metrics(state: SessionState) -> None:
    frames = list(state.window)
    if len(frames) < 3:
        return
    history = GraphHistory(mu=state.config.mu, reset_capacity=10_000)
    for _, positions in frames:
        ids = sorted(positions)
        history.append([positions[i] for i in ids], ids=ids)
    dt = state.config.scenario.tick_dt
    profile = compute_profile(history, HUMAN_ID, dt=dt)
    zeta = profile.scalar_or_none()
    if zeta is None:
        return
    state.zeta = zeta
    theta, _ = state.config.mapping.map(zeta)
    state.theta = theta
    state.cluster = cluster_label_for(theta, state.config.centroids)
    closeness_sle = profile.sle.get("closeness")
    closeness_sie = profile.sie.get("closeness")
    if closeness_sle is not None and closeness_sle.size:
        state.sle = float(closeness_sle[-1])
        state.sie = float(closeness_sie[-1])


def session_tick(state: SessionState, pending_controls: list[dict] | None = None) -> dict:
    """Advance the session by one fixed tick and emit the state frame."""
    if state.stopped:
        raise RuntimeError("session already stopped")
    errors: list[dict] = []
    controls: dict[int, ExternalControl] = {}
    controls[HUMAN_ID] = _human_control(state, pending_controls or [], errors)

    planner = state.planner
    if planner is not None:
        ego = state.world.vehicle(EGO_ID)
        if (
            state.tick % state.config.planner.replan_every == 0
            and EGO_ID not in state.world.shifts
        ):
            observed_theta = state.theta if state.theta is not None else 0.0
            others = sorted(
                (v for v in state.world.vehicles if v.id != EGO_ID),
                key=lambda v: abs(v.x - ego.x),
            )
            neighbors = []
            for v in others[: state.config.planner.max_neighbors]:
                if abs(v.x - ego.x) >= state.config.planner.neighbor_radius:
                    continue
                theta_v = observed_theta if v.id == HUMAN_ID else 0.0
                neighbors.append((vehicle_spec(v, desired_speed=v.v, theta=theta_v), v.lane))
            plan = planner.plan(
                vehicle_spec(ego, desired_speed=planner.desired_speed, theta=planner.theta_ego),
                ego.lane,
                neighbors,
            )
            lane_request = None
            if plan.lane > ego.lane:
                lane_request = "left"
            elif plan.lane < ego.lane:
                lane_request = "right"
            state.ego_control = ExternalControl(accel=plan.accel, lane=lane_request)
        else:
            state.ego_control = ExternalControl(accel=state.ego_control.accel)
        controls[EGO_ID] = state.ego_control

    world, events = step(state.world, controls=controls)
    state.world = world
    state.trajectory.record(world)
    state.window.append((world.tick, world.positions()))

    if world.tick % state.refresh_ticks == 0:
        _refresh_metrics(state)

    return {
        "v": PROTOCOL_VERSION,
        "type": "state",
        "session": state.session_id,
        "tick": world.tick,
        "sim_time_s": world.time_s,
        "vehicles": [
            {
                "id": v.id,
                "lane": v.lane,
                "x_m": v.x,
                "y_m": v.y,
                "speed_mps": v.v,
                "class": v.class_tag,
            }
            for v in sorted(world.vehicles, key=lambda s: s.id)
        ],
        "metrics": {
            "zeta": state.zeta,
            "theta": state.theta,
            "cluster": state.cluster,
            "sle": state.sle,
            "sie": state.sie,
        },
        "events": [
            {"kind": e.kind, "agents": list(e.agents), "data": e.data} for e in events
        ]
        + ([{"kind": "control_error", "errors": errors}] if errors else []),
    }


class SessionManager:
    """Lifecycle and registry for concurrent, isolated sessions."""

    def __init__(self):
        self.sessions: dict[str, SessionState] = {}

    def start_session(self, config: SessionConfig | dict | None = None) -> SessionState:
        if isinstance(config, dict):
            config = SessionConfig.from_payload(config)
        state = create_session(config or SessionConfig())
        self.sessions[state.session_id] = state
        return state

    def get(self, session_id: str) -> SessionState:
        state = self.sessions.get(session_id)
        if state is None:
            raise KeyError(f"unknown session {session_id!r}")
        return state

    def tick(self, session_id: str, controls: list[dict] | None = None) -> dict:
        return session_tick(self.get(session_id), controls)

    def stop_session(self, session_id: str) -> dict:
        state = self.get(session_id)
        if state.stopped:
            raise RuntimeError(f"session {session_id} already stopped")
        state.stopped = True
        profile_json = None
        if len(state.window) >= 3:
            history = GraphHistory(mu=state.config.mu, reset_capacity=10_000)
            for _, positions in state.window:
                ids = sorted(positions)
                history.append([positions[i] for i in ids], ids=ids)
            profile = compute_profile(
                history, HUMAN_ID, dt=state.config.scenario.tick_dt
            )
            profile_json = profile.to_json()
        return {
            "trajectory_csv": state.trajectory.to_csv(),
            "behavior_profile_json": profile_json,
            "ticks": state.tick,
        }
