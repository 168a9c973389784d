"""Fixed-timestep multi-lane world stepping.

``step`` is a pure function of (world, controls, dt): all decisions are taken
on the pre-step snapshot, then applied simultaneously, so identical inputs
produce bit-identical successor states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import mobil
from .idm import idm_acceleration_from_gap, LeadInfo
from .mobil import Neighbor, Neighborhood
from .params import (
    AGGRESSIVE_V0,
    CLASS_AGGRESSIVE,
    CLASS_CONSERVATIVE,
    CLASS_EXTERNAL,
    CONSERVATIVE_V0,
    DriverParams,
    ScenarioConfig,
    VEHICLE_LENGTH,
)
from .state import (
    COLLISION,
    COLLISION_IMMINENT,
    Event,
    LANE_CHANGE,
    NEAR_COLLISION,
    REJECTED_UNSAFE,
    VehicleState,
)

NEAR_COLLISION_GAP = 1.0  # m
CONTROL_ACCEL = 2.0  # m/s^2, keyboard accelerate/brake offset magnitude


class CapacityError(ValueError):
    """Requested population does not fit on the road."""


@dataclass(frozen=True)
class ExternalControl:
    """Per-tick command for an externally controlled agent.

    ``accel`` is an absolute acceleration command (planner); ``offset`` is
    added to the agent's IDM default (human accelerate/brake keys). ``lane``
    requests a safety-gated discrete change ("left" or "right").
    """

    accel: float | None = None
    offset: float = 0.0
    lane: str | None = None


@dataclass(frozen=True)
class LaneShift:
    """In-flight lateral interpolation between two lane centers."""

    y_from: float
    y_to: float
    ticks_left: int
    ticks_total: int


@dataclass(frozen=True)
class World:
    config: ScenarioConfig
    vehicles: tuple[VehicleState, ...]
    params: dict[int, DriverParams]
    tick: int = 0
    shifts: dict[int, LaneShift] = field(default_factory=dict)

    @property
    def time_s(self) -> float:
        return self.tick * self.config.tick_dt

    def vehicle(self, agent_id: int) -> VehicleState:
        for v in self.vehicles:
            if v.id == agent_id:
                return v
        raise KeyError(f"no vehicle with id {agent_id}")

    def positions(self) -> dict[int, tuple[float, float]]:
        return {v.id: (v.x, v.y) for v in self.vehicles}


def _lane_order(vehicles) -> dict[int, list[VehicleState]]:
    lanes: dict[int, list[VehicleState]] = {}
    for v in vehicles:
        lanes.setdefault(v.lane, []).append(v)
    for lane in lanes.values():
        lane.sort(key=lambda s: (s.x, s.id))
    return lanes


def _leader_follower(
    lane: list[VehicleState], x: float, exclude: int
) -> tuple[VehicleState | None, VehicleState | None]:
    leader = None
    follower = None
    for s in lane:
        if s.id == exclude:
            continue
        if s.x >= x:
            if leader is None or s.x < leader.x:
                leader = s
        else:
            if follower is None or s.x > follower.x:
                follower = s
    return leader, follower


def neighborhood(world: World, ego: VehicleState) -> Neighborhood:
    """Collect leaders/followers around ``ego`` in current and adjacent lanes."""
    lanes = _lane_order(world.vehicles)

    def pair(lane_idx: int) -> tuple[Neighbor | None, Neighbor | None]:
        members = lanes.get(lane_idx, [])
        lead, follow = _leader_follower(members, ego.x, ego.id)
        wrap = lambda s: Neighbor(s, world.params[s.id]) if s is not None else None
        return wrap(lead), wrap(follow)

    n_lanes = world.config.n_lanes
    leader, follower = pair(ego.lane)
    has_left = ego.lane + 1 < n_lanes
    has_right = ego.lane - 1 >= 0
    if world.config.scenario_kind == "merge" and ego.lane == 1:
        # lane 0 is the ending merge lane; through traffic does not drop into it
        has_right = False
    left_leader, left_follower = pair(ego.lane + 1) if has_left else (None, None)
    right_leader, right_follower = pair(ego.lane - 1) if has_right else (None, None)
    return Neighborhood(
        leader=leader,
        follower=follower,
        left_leader=left_leader,
        left_follower=left_follower,
        right_leader=right_leader,
        right_follower=right_follower,
        has_left=has_left,
        has_right=has_right,
    )


def _merge_wall(ego: VehicleState, config: ScenarioConfig) -> VehicleState | None:
    """Virtual standstill leader at the end of the merge lane."""
    if config.scenario_kind != "merge" or ego.lane != 0:
        return None
    return VehicleState(
        id=-1, x=config.merge_point_m + VEHICLE_LENGTH, y=0.0, lane=0, v=0.0
    )


def _longitudinal_accel(
    world: World, ego: VehicleState, control: ExternalControl | None
) -> tuple[float, bool]:
    """(acceleration, collision_imminent flag) for one vehicle."""
    params = world.params[ego.id]
    lanes = _lane_order(world.vehicles)
    leader, _ = _leader_follower(lanes.get(ego.lane, []), ego.x, ego.id)
    wall = _merge_wall(ego, world.config)
    if wall is not None and (leader is None or wall.x < leader.x):
        leader = wall

    if control is not None and control.accel is not None:
        accel = control.accel
        imminent = False
    else:
        lead = None
        if leader is not None:
            lead = LeadInfo(
                gap=leader.x - ego.x - VEHICLE_LENGTH, closing_speed=ego.v - leader.v
            )
        accel = idm_acceleration_from_gap(ego.v, params, lead)
        imminent = lead is not None and lead.gap <= 0.0
        if control is not None:
            accel += max(-CONTROL_ACCEL, min(CONTROL_ACCEL, control.offset))
    floor = -2.0 * params.b_comf
    ceil = params.a_max
    if control is not None:
        floor -= CONTROL_ACCEL
        ceil += CONTROL_ACCEL
    return max(floor, min(ceil, accel)), imminent


def step(
    world: World,
    controls: dict[int, ExternalControl] | None = None,
    dt: float | None = None,
) -> tuple[World, list[Event]]:
    """Advance the world by one tick and return (next_world, events)."""
    config = world.config
    if dt is None:
        dt = config.tick_dt
    if not math.isclose(dt, config.tick_dt):
        raise ValueError(f"dt {dt} does not match configured tick_dt {config.tick_dt}")
    controls = controls or {}
    events: list[Event] = []
    tick = world.tick

    ordered = sorted(world.vehicles, key=lambda v: v.id)

    # Phase 1: longitudinal accelerations from the snapshot.
    accels: dict[int, float] = {}
    for ego in ordered:
        accel, imminent = _longitudinal_accel(world, ego, controls.get(ego.id))
        accels[ego.id] = accel
        if imminent:
            events.append(Event(tick, COLLISION_IMMINENT, (ego.id,)))

    # Phase 2: lane decisions from the snapshot (skipped mid-shift).
    lane_targets: dict[int, int] = {}
    for ego in ordered:
        if ego.id in world.shifts:
            continue
        params = world.params[ego.id]
        hood = neighborhood(world, ego)
        control = controls.get(ego.id)
        if ego.class_tag == CLASS_EXTERNAL:
            if control is None or control.lane is None:
                continue
            direction = control.lane
            if direction == "left" and hood.has_left:
                target_follower, target_leader, target = (
                    hood.left_follower, hood.left_leader, ego.lane + 1,
                )
            elif direction == "right" and hood.has_right:
                target_follower, target_leader, target = (
                    hood.right_follower, hood.right_leader, ego.lane - 1,
                )
            else:
                events.append(Event(tick, REJECTED_UNSAFE, (ego.id,), {"reason": "no_lane"}))
                continue
            if mobil.lane_change_safe(ego, params, target_follower, target_leader):
                lane_targets[ego.id] = target
            else:
                events.append(
                    Event(tick, REJECTED_UNSAFE, (ego.id,), {"reason": "safety"})
                )
        else:
            mandatory = config.scenario_kind == "merge" and ego.lane == 0
            decision = mobil.mobil_decide(ego, params, hood, mandatory_left=mandatory)
            if decision == mobil.CHANGE_LEFT:
                lane_targets[ego.id] = ego.lane + 1
            elif decision == mobil.CHANGE_RIGHT:
                lane_targets[ego.id] = ego.lane - 1

    # Phase 3: integrate (semi-implicit Euler) and apply lane changes.
    shift_ticks = max(1, int(round(config.lane_change_duration_s / config.tick_dt)))
    new_vehicles: list[VehicleState] = []
    new_shifts: dict[int, LaneShift] = {}
    for ego in ordered:
        v_new = max(0.0, ego.v + accels[ego.id] * dt)
        x_new = ego.x + v_new * dt
        lane_new = ego.lane
        y_new = ego.y

        shift = world.shifts.get(ego.id)
        if ego.id in lane_targets:
            lane_new = lane_targets[ego.id]
            shift = LaneShift(
                y_from=ego.y,
                y_to=config.lane_center(lane_new),
                ticks_left=shift_ticks,
                ticks_total=shift_ticks,
            )
            events.append(
                Event(tick, LANE_CHANGE, (ego.id,), {"from": ego.lane, "to": lane_new})
            )
        if shift is not None:
            ticks_left = shift.ticks_left - 1
            frac = 1.0 - ticks_left / shift.ticks_total
            y_new = shift.y_from + frac * (shift.y_to - shift.y_from)
            if ticks_left > 0:
                new_shifts[ego.id] = replace(shift, ticks_left=ticks_left)
            else:
                y_new = shift.y_to
        heading = math.atan2(y_new - ego.y, max(v_new * dt, 1e-9)) if v_new > 0 else 0.0
        new_vehicles.append(
            ego.moved(x=x_new, y=y_new, lane=lane_new, v=v_new, heading=heading)
        )

    # Phase 4: contact events on the post-step state.
    lanes = _lane_order(new_vehicles)
    for members in lanes.values():
        for a, b in zip(members, members[1:]):
            gap = b.x - a.x - VEHICLE_LENGTH
            if gap < 0.0:
                events.append(Event(tick, COLLISION, (a.id, b.id)))
            elif gap < NEAR_COLLISION_GAP:
                events.append(Event(tick, NEAR_COLLISION, (a.id, b.id)))

    next_world = World(
        config=config,
        vehicles=tuple(new_vehicles),
        params=world.params,
        tick=tick + 1,
        shifts=new_shifts,
    )
    return next_world, events


def spawn_population(config: ScenarioConfig) -> World:
    """Create the initial world for a scenario, deterministic under its seed.

    Conservative agents get v0 = 25 m/s jittered uniformly by +/-10%;
    aggressive agents get v0 = 40 m/s exactly. Everyone starts at their
    desired speed at jittered uniform spacings along their lane.
    """
    rng = np.random.default_rng(config.seed)
    n = config.n_vehicles
    per_lane_capacity = int(config.road_length_m // config.min_spawn_spacing_m)
    if n > config.n_lanes * per_lane_capacity:
        raise CapacityError(
            f"{n} vehicles exceed capacity "
            f"{config.n_lanes * per_lane_capacity} of a "
            f"{config.road_length_m} m x {config.n_lanes}-lane road"
        )

    n_aggressive = int(round(config.class_mix * n))
    tags = [CLASS_AGGRESSIVE] * n_aggressive + [CLASS_CONSERVATIVE] * (n - n_aggressive)
    order = rng.permutation(n)
    tags = [tags[i] for i in order]

    # In merge scenarios the ending lane 0 is left to merging traffic.
    spawn_lanes = list(range(config.n_lanes))
    if config.scenario_kind == "merge" and config.n_lanes > 1:
        spawn_lanes = spawn_lanes[1:]

    per_lane: dict[int, int] = {lane: 0 for lane in spawn_lanes}
    vehicles: list[VehicleState] = []
    params: dict[int, DriverParams] = {}
    for agent_id in range(n):
        lane = spawn_lanes[agent_id % len(spawn_lanes)]
        slot = per_lane[lane]
        per_lane[lane] += 1
        tag = tags[agent_id]
        if tag == CLASS_AGGRESSIVE:
            v0 = AGGRESSIVE_V0
        else:
            v0 = CONSERVATIVE_V0 * (1.0 + rng.uniform(-0.1, 0.1))
        p = config.driver_params(tag, v0=v0)
        jitter = rng.uniform(0.0, 0.3 * config.min_spawn_spacing_m)
        x = slot * config.min_spawn_spacing_m * 1.5 + jitter
        vehicles.append(
            VehicleState(
                id=agent_id,
                x=x,
                y=config.lane_center(lane),
                lane=lane,
                v=p.v0,
                class_tag=tag,
            )
        )
        params[agent_id] = p
    return World(config=config, vehicles=tuple(vehicles), params=params)


def run(
    world: World,
    n_ticks: int,
    controls_for_tick=None,
) -> tuple[World, list[VehicleState], list[Event]]:
    """Roll a world forward, collecting per-tick vehicle snapshots and events.

    ``controls_for_tick(tick, world)`` may supply external controls. The
    returned snapshot list includes the initial state (tick 0) through the
    state after the final tick.
    """
    snapshots = list(world.vehicles)
    all_events: list[Event] = []
    for _ in range(n_ticks):
        controls = controls_for_tick(world.tick, world) if controls_for_tick else None
        world, events = step(world, controls)
        snapshots.extend(world.vehicles)
        all_events.extend(events)
    return world, snapshots, all_events
