"""Standard scenario builders shared by the experiment suite and the CLI.

Two kinds of episodes:

* closed-loop highway driving, where a planner-controlled ego is inserted
  into IDM traffic and re-plans on a fixed cadence;
* open-loop merge games, where two planner-modeled agents approach a merge
  point and their solved policies are rolled out under process noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..game.planner import (
    ConflictSpec,
    AgentSpec,
    PlannerConfig,
    RecedingHorizonPlanner,
    build_planning_game,
    joint_state,
    solve_with_fallback,
)
from ..game.rollout import rollout_with_policies
from ..game.solver import solve_nash
from ..sim.params import CLASS_CONSERVATIVE, CLASS_EXTERNAL, ScenarioConfig
from ..sim.state import LANE_CHANGE, VehicleState
from ..sim.trajectory import Trajectory
from ..sim.world import ExternalControl, World, spawn_population, step

EGO_ID = 1000


def vehicle_spec(v: VehicleState, desired_speed: float, theta: float) -> AgentSpec:
    vx = v.v * math.cos(v.heading)
    vy = v.v * math.sin(v.heading)
    return AgentSpec(
        agent_id=v.id,
        state=(v.x, v.y, vx, vy),
        desired_speed=desired_speed,
        lane_ref_y=v.lane * 4.0,
        theta=theta,
    )


@dataclass
class DriveResult:
    trajectory: Trajectory
    events: list
    ego_lane_changes: int
    overtakes: int
    planner_fallbacks: int


def insert_ego(
    world: World, lane: int, v: float, x: float | None = None
) -> World:
    """Add the planner-controlled ego to a spawned world.

    Without an explicit ``x`` the ego is slotted into the largest gap of its
    lane near the middle of the pack, so episodes start embedded in traffic
    rather than chasing it from behind.
    """
    config = world.config
    if x is None:
        xs = sorted(v2.x for v2 in world.vehicles)
        mid = xs[len(xs) // 2] if xs else 0.0
        lane_xs = sorted(v2.x for v2 in world.vehicles if v2.lane == lane)
        if len(lane_xs) >= 2:
            gaps = [
                ((a + b) / 2.0, b - a)
                for a, b in zip(lane_xs, lane_xs[1:])
            ]
            x, _ = min(gaps, key=lambda g: (abs(g[0] - mid) - 0.1 * g[1]))
        elif lane_xs:
            x = lane_xs[0] + 30.0
        else:
            x = mid
    ego = VehicleState(
        id=EGO_ID,
        x=x,
        y=config.lane_center(lane),
        lane=lane,
        v=v,
        class_tag=CLASS_EXTERNAL,
    )
    params = dict(world.params)
    params[EGO_ID] = config.driver_params("conservative", v0=v)
    return World(
        config=config,
        vehicles=world.vehicles + (ego,),
        params=params,
        tick=world.tick,
        shifts=dict(world.shifts),
    )


def drive_with_planner(
    config: ScenarioConfig,
    planner_config: PlannerConfig,
    theta_ego: float,
    ego_desired_speed: float = 30.0,
    theta_humans: float = 0.0,
    n_ticks: int | None = None,
    uniform_traffic_speed: float | None = None,
) -> DriveResult:
    """Closed-loop episode: planner ego inside seeded IDM traffic.

    ``uniform_traffic_speed`` flattens the background pack to one shared
    desired speed (positions keep their seeded jitter). A stationary pack
    keeps the traffic graph connected, which calibration runs need: the
    behavior score should reflect the ego's maneuvering, not component
    splits far down the road.
    """
    world = spawn_population(config)
    if uniform_traffic_speed is not None:
        u = uniform_traffic_speed
        params = {
            vid: config.driver_params(CLASS_CONSERVATIVE, v0=u) for vid in world.params
        }
        world = World(
            config=config,
            vehicles=tuple(v.moved(v=u) for v in world.vehicles),
            params=params,
        )
    start_lane = config.n_lanes // 2
    if config.scenario_kind == "merge":
        start_lane = 0
    world = insert_ego(world, lane=start_lane, v=ego_desired_speed * 0.8)
    planner = RecedingHorizonPlanner(
        planner_config,
        theta_ego=theta_ego,
        desired_speed=ego_desired_speed,
        lane_width=config.lane_width,
        n_lanes=config.n_lanes,
    )
    n_ticks = n_ticks if n_ticks is not None else config.n_ticks

    trajectory = Trajectory(metadata={"theta_ego": theta_ego, "seed": config.seed})
    trajectory.record(world)
    events = []
    fallbacks = 0
    overtakes = 0
    control = ExternalControl(accel=0.0)
    ahead_of: set[int] = {
        v.id for v in world.vehicles if v.id != EGO_ID and world.vehicle(EGO_ID).x > v.x
    }
    for tick in range(n_ticks):
        ego = world.vehicle(EGO_ID)
        if tick % planner_config.replan_every == 0 and EGO_ID not in world.shifts:
            others = sorted(
                (v for v in world.vehicles if v.id != EGO_ID),
                key=lambda v: abs(v.x - ego.x),
            )
            neighbors = [
                (vehicle_spec(v, desired_speed=v.v, theta=theta_humans), v.lane)
                for v in others[: planner_config.max_neighbors]
                if abs(v.x - ego.x) < planner_config.neighbor_radius
            ]
            ego_spec = vehicle_spec(ego, desired_speed=planner.desired_speed, theta=theta_ego)
            result = planner.plan(ego_spec, ego.lane, neighbors)
            if result.fell_back:
                fallbacks += 1
            lane_request = None
            if result.lane > ego.lane:
                lane_request = "left"
            elif result.lane < ego.lane:
                lane_request = "right"
            control = ExternalControl(accel=result.accel, lane=lane_request)
        else:
            control = ExternalControl(accel=control.accel)
        world, tick_events = step(world, controls={EGO_ID: control})
        events.extend(tick_events)
        trajectory.record(world)
        ego = world.vehicle(EGO_ID)
        now_ahead = {v.id for v in world.vehicles if v.id != EGO_ID and ego.x > v.x}
        overtakes += len(now_ahead - ahead_of)
        ahead_of = now_ahead

    changes = sum(
        1 for e in events if e.kind == LANE_CHANGE and e.agents == (EGO_ID,)
    )
    return DriveResult(
        trajectory=trajectory,
        events=events,
        ego_lane_changes=changes,
        overtakes=overtakes,
        planner_fallbacks=fallbacks,
    )


# --- merge games ---------------------------------------------------------------


@dataclass(frozen=True)
class MergeSetup:
    merge_x: float = 140.0
    approach_speed: float = 20.0
    lane_width: float = 4.0
    horizon: int = 55
    stagger: float = 1.5  # +/- initial longitudinal offset range (m)
    reaction_window_s: float = 3.0  # conflict activates this long before arrival
    q_progress: float = 0.0  # optional merge urgency (linear progress reward)
    lead_factor: float = 2.0  # the agent committing in front bears extra crossing risk


@dataclass
class MergeOutcome:
    min_distance: float
    crossed_first: str  # "a" or "b"
    yielded: str  # the agent that crossed second
    states: np.ndarray  # (T+1, 8)
    breakdown_fallback: bool


def merge_agents(
    theta_a: float, theta_b: float, setup: MergeSetup, rng, planner_config: PlannerConfig
) -> tuple[list[AgentSpec], np.ndarray, int]:
    """Two streams zipper-merging into the shared center lane.

    Agent ``a`` approaches from the right lane, ``b`` from the left; both
    lateral references switch to the shared lane when the conflict
    activates, so the encounter is geometrically symmetric and outcomes are
    driven by the risk parameters and the random stagger alone. The streams
    are only in conflict once joined: the separation cost activates on the
    horizon step where the leading agent is expected to reach the merge
    point, less a reaction window. Returns (agents, activation weights,
    activation step).
    """
    offset = rng.uniform(-setup.stagger, setup.stagger)
    speed_jitter_a = rng.uniform(-0.5, 0.5)
    speed_jitter_b = rng.uniform(-0.5, 0.5)
    T = setup.horizon
    dt = planner_config.plan_dt

    lead_x = max(offset, -offset)
    t_arrive = (setup.merge_x - lead_x) / setup.approach_speed
    t_act = min(max(0, int((t_arrive - setup.reaction_window_s) / dt)), T)
    weights = np.zeros(T + 1)
    weights[t_act:] = 1.0
    y_shared = setup.lane_width
    y_ref_a = np.full(T + 1, 0.0)
    y_ref_a[t_act:] = y_shared
    y_ref_b = np.full(T + 1, 2.0 * setup.lane_width)
    y_ref_b[t_act:] = y_shared

    a = AgentSpec(
        agent_id=0,
        state=(offset, 0.0, setup.approach_speed + speed_jitter_a, 0.0),
        desired_speed=setup.approach_speed,
        lane_ref_y=y_ref_a,
        theta=theta_a,
    )
    b = AgentSpec(
        agent_id=1,
        state=(-offset, 2.0 * setup.lane_width, setup.approach_speed + speed_jitter_b, 0.0),
        desired_speed=setup.approach_speed,
        lane_ref_y=y_ref_b,
        theta=theta_b,
    )
    return [a, b], weights, t_act


def _ordering_games(agents, weights, cfg: PlannerConfig, setup: MergeSetup):
    """The two anchored-ordering candidate games (a leads / b leads)."""
    game_a_leads = build_planning_game(
        agents,
        cfg,
        [
            ConflictSpec(
                0, 1, weight=weights, target=cfg.gap_target,
                weight_i=setup.lead_factor, weight_j=1.0,
            )
        ],
    )
    game_b_leads = build_planning_game(
        agents,
        cfg,
        [
            ConflictSpec(
                0, 1, weight=weights, target=-cfg.gap_target,
                weight_i=1.0, weight_j=setup.lead_factor,
            )
        ],
    )
    return {"a": game_a_leads, "b": game_b_leads}  # values are (game, consts) pairs


def plan_merge(
    belief_thetas: tuple[float, float],
    agents,
    weights,
    cfg: PlannerConfig,
    setup: MergeSetup,
):
    """Solve both ordering candidates under one belief and pick the anchor.

    Committing in front through the bottleneck is the costly role (extra
    crossing-risk weight, noise-inflated for the risk-averse). The pair
    coordinates on the ordering whose leader is the less reluctant one:
    each agent's reluctance is its own value of leading minus its value of
    following, so a risk-seeker grabs the lead a risk-averse opponent is
    happy to concede. Returns (ordering, solutions dict, games dict,
    fell_back).
    """
    believed = [
        replace(agents[0], theta=belief_thetas[0]),
        replace(agents[1], theta=belief_thetas[1]),
    ]
    games = _ordering_games(believed, weights, cfg, setup)
    solutions = {}
    fell_back = False
    for key, (game, _) in games.items():
        solutions[key], fb = solve_with_fallback(game)
        fell_back = fell_back or fb
    x0 = joint_state(believed)

    def value(player, key):
        return solutions[key].value(player, 0, x0) + games[key][1][player]

    reluctance_a = value(0, "a") - value(0, "b")
    reluctance_b = value(1, "b") - value(1, "a")
    ordering = "a" if reluctance_a <= reluctance_b else "b"
    return ordering, solutions, games, fell_back


def run_merge_episode(
    theta_a: float,
    theta_b: float,
    seed: int,
    planner_config: PlannerConfig | None = None,
    setup: MergeSetup = MergeSetup(),
    theta_b_model_for_a: float | None = None,
) -> MergeOutcome:
    """Plan and roll out one noisy merge encounter.

    ``theta_b_model_for_a`` makes agent a (the ego side of the baseline
    comparison) plan against a mis-modeled opponent: a's policy comes from
    its own belief game while b keeps acting under the true game.
    """
    planner_config = planner_config or PlannerConfig()
    cfg = replace(
        planner_config, horizon=setup.horizon, q_progress=setup.q_progress
    )
    rng = np.random.default_rng(seed)
    agents, weights, t_act = merge_agents(theta_a, theta_b, setup, rng, cfg)

    ordering, solutions, games, fell_back = plan_merge(
        (theta_a, theta_b), agents, weights, cfg, setup
    )
    solution = solutions[ordering]
    policies = list(zip(solution.K, solution.k))

    if theta_b_model_for_a is not None:
        ordering_a, solutions_a, _, fb_a = plan_merge(
            (theta_a, theta_b_model_for_a), agents, weights, cfg, setup
        )
        fell_back = fell_back or fb_a
        sol_a = solutions_a[ordering_a]
        policies = [(sol_a.K[0], sol_a.k[0]), (solution.K[1], solution.k[1])]

    x0 = joint_state(agents)
    result = rollout_with_policies(
        games[ordering][0], policies, x0, noise_seed=seed, n_samples=1
    )
    states = result.states[0]

    pa = states[:, 0:2]
    pb = states[:, 4:6]
    dists = np.linalg.norm(pa - pb, axis=1)[t_act:]
    t_a = np.argmax(states[:, 0] >= setup.merge_x)
    t_b = np.argmax(states[:, 4] >= setup.merge_x)
    reached_a = states[:, 0].max() >= setup.merge_x
    reached_b = states[:, 4].max() >= setup.merge_x
    if not reached_a and reached_b:
        first = "b"
    elif not reached_b and reached_a:
        first = "a"
    elif not reached_a and not reached_b:
        first = "a" if states[-1, 0] >= states[-1, 4] else "b"
    else:
        first = "a" if t_a <= t_b else "b"
    return MergeOutcome(
        min_distance=float(dists.min()),
        crossed_first=first,
        yielded="b" if first == "a" else "a",
        states=states,
        breakdown_fallback=fell_back,
    )
