"""Receding-horizon planning on top of the game solver.

Each re-plan builds a finite-horizon game over the ego and its nearest
neighbors, linearized around lane-following motion: per-agent state
[p_x, p_y, v_x, v_y] with acceleration controls, quadratic tracking of a
desired speed and a lane-center reference, and quadratic separation terms
between laterally conflicting pairs. Process noise enters on the velocity
components, which is where the per-agent risk parameters act.

Discrete lane intent is handled by reference switching: one candidate game
is solved per reachable lane, and the ego commits to the lane whose game
value (risk-adjusted cost-to-go, constants included) is lowest, with a
switching margin for hysteresis. The first longitudinal control of the
winning game is applied; the lane request goes through the simulator's
safety gate like any other lane change.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .solver import solve_nash
from .types import LQGame, NashSolution

log = logging.getLogger(__name__)

STATE_DIM = 4  # [p_x, p_y, v_x, v_y] per agent
CONTROL_DIM = 2  # [a_x, a_y]


@dataclass(frozen=True)
class AgentSpec:
    """One participant of a planning game.

    ``lane_ref_y`` may be a scalar or a per-step schedule of length T+1
    (merging agents switch their lateral reference mid-horizon).
    """

    agent_id: int
    state: tuple[float, float, float, float]  # (p_x, p_y, v_x, v_y)
    desired_speed: float
    lane_ref_y: float | tuple
    theta: float


@dataclass(frozen=True)
class PlannerConfig:
    horizon: int = 20
    plan_dt: float = 0.2
    q_speed: float = 0.5
    q_lane: float = 0.3
    q_lat_speed: float = 0.6
    q_gap: float = 1.0
    q_progress: float = 0.0  # linear reward on longitudinal progress (merge urgency)
    gap_target: float = 14.0
    r_accel: float = 0.8
    r_lat_accel: float = 1.6
    sigma_accel: float = 0.35  # process noise on v_x per agent (m/s^2 scale)
    sigma_lat: float = 0.25
    switch_margin: float = 1.0
    cut_in_factor: float = 1.5  # extra transient weight carried by a lane-changer
    neighbor_radius: float = 70.0
    max_neighbors: int = 3
    replan_every: int = 3  # sim ticks between re-plans
    terminal_weight: float = 1.0


@dataclass(frozen=True)
class ConflictSpec:
    """Separation cost between two agents contesting the same stretch of lane.

    ``target`` fixes the anchored longitudinal order (+gap puts agent ``i``
    ahead); None anchors to the current order. ``weight_i``/``weight_j``
    scale how much of the separation cost each member carries: the agent
    committing in front through a bottleneck bears the crossing risk, so
    ordering candidates weigh the leader more heavily.
    """

    i: int
    j: int
    weight: float | tuple | np.ndarray = 1.0
    target: float | None = None
    weight_i: float = 1.0
    weight_j: float = 1.0


def _schedule(value, T: int) -> np.ndarray:
    """Broadcast a scalar or per-step sequence to length T+1."""
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return np.full(T + 1, float(arr))
    if arr.shape != (T + 1,):
        raise ValueError(f"schedule must be scalar or length {T + 1}")
    return arr


def build_planning_game(
    agents: list[AgentSpec],
    config: PlannerConfig,
    conflicts: list[ConflictSpec],
) -> tuple[LQGame, np.ndarray]:
    """Assemble the joint LQ game for one candidate plan.

    Conflict weights and lane references may be per-step schedules, which is
    how merge geometry is expressed: the separation cost switches on when
    the streams actually join.

    Returns the game plus each player's completed-square constant (the
    reference-dependent part of the tracking costs that Q and l cannot
    carry). Candidate comparisons must add it to the solved value, or a
    candidate with a larger reference would look spuriously cheap.
    """
    N = len(agents)
    n = STATE_DIM * N
    dt = config.plan_dt
    T = config.horizon

    A1 = np.array(
        [[1, 0, dt, 0], [0, 1, 0, dt], [0, 0, 1, 0], [0, 0, 0, 1]], dtype=float
    )
    B1 = np.array([[0, 0], [0, 0], [dt, 0], [0, dt]], dtype=float)
    A = np.zeros((n, n))
    W = np.zeros((n, n))
    B = []
    for i in range(N):
        s = STATE_DIM * i
        A[s : s + 4, s : s + 4] = A1
        W[s + 2, s + 2] = (config.sigma_accel * dt) ** 2
        W[s + 3, s + 3] = (config.sigma_lat * dt) ** 2
        Bi = np.zeros((n, CONTROL_DIM))
        Bi[s : s + 4] = B1
        B.append(Bi)

    lane_refs = [_schedule(a.lane_ref_y, T) for a in agents]

    Qs, ls, Rs = [], [], []
    consts = np.zeros(N)
    for i in range(N):
        s = STATE_DIM * i
        Q = np.zeros((T + 1, n, n))
        l = np.zeros((T + 1, n))
        const = np.zeros(T + 1)
        Q[:, s + 2, s + 2] += config.q_speed
        l[:, s + 2] -= config.q_speed * agents[i].desired_speed
        const += 0.5 * config.q_speed * agents[i].desired_speed**2
        Q[:, s + 1, s + 1] += config.q_lane
        l[:, s + 1] -= config.q_lane * lane_refs[i]
        const += 0.5 * config.q_lane * lane_refs[i] ** 2
        Q[:, s + 3, s + 3] += config.q_lat_speed
        l[:, s] -= config.q_progress
        for spec in conflicts:
            if i == spec.i:
                member_scale = spec.weight_i
            elif i == spec.j:
                member_scale = spec.weight_j
            else:
                continue
            sa, sb = STATE_DIM * spec.i, STATE_DIM * spec.j
            if spec.target is None:
                gap_now = agents[spec.i].state[0] - agents[spec.j].state[0]
                target = config.gap_target if gap_now >= 0 else -config.gap_target
            else:
                target = spec.target
            # 0.5*w_t*q*(p_i - p_j - target)^2 expanded into Q_t, l_t and const_t
            wq = _schedule(spec.weight, T) * config.q_gap * member_scale
            Q[:, sa, sa] += wq
            Q[:, sb, sb] += wq
            Q[:, sa, sb] -= wq
            Q[:, sb, sa] -= wq
            l[:, sa] -= wq * target
            l[:, sb] += wq * target
            const += 0.5 * wq * target**2
        Q[T] *= config.terminal_weight
        l[T] *= config.terminal_weight
        const[T] *= config.terminal_weight
        consts[i] = const.sum()
        Qs.append(Q)
        ls.append(l)
        row = []
        for j in range(N):
            if i == j:
                Rij = np.tile(np.diag([config.r_accel, config.r_lat_accel]), (T, 1, 1))
            else:
                Rij = np.zeros((T, CONTROL_DIM, CONTROL_DIM))
            row.append(Rij)
        Rs.append(row)

    game = LQGame(
        A=np.tile(A, (T, 1, 1)),
        B=[np.tile(Bi, (T, 1, 1)) for Bi in B],
        W=np.tile(W, (T, 1, 1)),
        Q=Qs,
        l=ls,
        R=Rs,
        thetas=[a.theta for a in agents],
        validate=False,  # constructed matrices are symmetric PSD by shape
    )
    return game, consts


def joint_state(agents: list[AgentSpec]) -> np.ndarray:
    return np.concatenate([np.asarray(a.state, dtype=float) for a in agents])


def solve_with_fallback(game: LQGame) -> tuple[NashSolution, bool]:
    """Solve; on neurotic breakdown retry risk-neutral (flag in the result)."""
    solution = solve_nash(game)
    if not solution.breakdown_flag:
        return solution, False
    log.warning(
        "neurotic breakdown at step %s (player %s); falling back to theta=0",
        solution.breakdown_t,
        solution.breakdown_player,
    )
    neutral = LQGame(
        A=game.A,
        B=game.B,
        W=game.W,
        Q=game.Q,
        l=game.l,
        R=game.R,
        thetas=np.zeros(game.n_players),
    )
    return solve_nash(neutral), True


@dataclass
class PlanResult:
    accel: float  # first longitudinal ego control
    lat_accel: float
    lane: int  # committed lane index
    value: float  # ego's risk-adjusted cost-to-go of the chosen candidate
    candidate_values: dict[int, float]
    fell_back: bool


class RecedingHorizonPlanner:
    """Per-tick lane selection and longitudinal control for one ego vehicle."""

    def __init__(
        self,
        config: PlannerConfig,
        theta_ego: float,
        desired_speed: float,
        lane_width: float = 4.0,
        n_lanes: int = 3,
    ):
        self.config = config
        self.theta_ego = theta_ego
        self.desired_speed = desired_speed
        self.lane_width = lane_width
        self.n_lanes = n_lanes
        self.committed_lane: int | None = None
        self.lane_changes = 0

    def _candidate_lanes(self, lane: int, allowed=None) -> list[int]:
        cands = [lane]
        if lane + 1 < self.n_lanes:
            cands.append(lane + 1)
        if lane - 1 >= 0:
            cands.append(lane - 1)
        if allowed is not None:
            cands = [c for c in cands if c in allowed]
        return cands

    def plan(
        self,
        ego: AgentSpec,
        ego_lane: int,
        neighbors: list[tuple[AgentSpec, int]],
        allowed_lanes=None,
    ) -> PlanResult:
        """Pick a lane reference and the first control for this re-plan.

        ``neighbors`` pairs each agent spec with its lane index; they keep
        their own lane references and risk parameters inside the game.
        """
        if self.committed_lane is None:
            self.committed_lane = ego_lane
        cfg = self.config
        T = cfg.horizon
        maneuver = max(1, int(round(1.0 / cfg.plan_dt)))  # ~1 s of lateral transit
        ramp_out = np.ones(T + 1)
        ramp_out[:maneuver] = np.linspace(1.0, 0.0, maneuver)
        ramp_out[maneuver:] = 0.0
        ramp_in = 1.0 - ramp_out

        values: dict[int, float] = {}
        firsts: dict[int, tuple[float, float]] = {}
        fell_back = False
        for lane in self._candidate_lanes(ego_lane, allowed_lanes):
            y_ref = lane * self.lane_width
            ego_spec = replace(ego, lane_ref_y=y_ref, theta=self.theta_ego)
            agents = [ego_spec] + [spec for spec, _ in neighbors]
            lanes = [{ego_lane}] + [{ln} for _, ln in neighbors]
            conflicts = []
            for i in range(len(agents)):
                for j in range(i + 1, len(agents)):
                    if abs(agents[i].state[0] - agents[j].state[0]) >= cfg.neighbor_radius:
                        continue
                    if i == 0 and lane != ego_lane:
                        # conflicts fade out of the old lane and into the target;
                        # the cutter bears extra crossing risk while merging in
                        other = next(iter(lanes[j]))
                        if other == ego_lane:
                            conflicts.append(ConflictSpec(i, j, weight=ramp_out))
                        elif other == lane:
                            conflicts.append(
                                ConflictSpec(i, j, weight=ramp_in, weight_i=cfg.cut_in_factor)
                            )
                    elif lanes[i] & lanes[j]:
                        conflicts.append(ConflictSpec(i, j))
            game, consts = build_planning_game(agents, cfg, conflicts)
            solution, fb = solve_with_fallback(game)
            fell_back = fell_back or fb
            x0 = joint_state(agents)
            values[lane] = solution.value(0, 0, x0) + consts[0]
            u0 = solution.control(0, x0)[0]
            firsts[lane] = (float(u0[0]), float(u0[1]))

        best = min(values, key=values.get)
        current = self.committed_lane if self.committed_lane in values else ego_lane
        chosen = current
        if best != current and values[best] < values[current] - self.config.switch_margin:
            chosen = best
        if chosen != self.committed_lane:
            self.lane_changes += 1
            self.committed_lane = chosen
        ax, ay = firsts[chosen]
        return PlanResult(
            accel=ax,
            lat_accel=ay,
            lane=chosen,
            value=values[chosen],
            candidate_values=values,
            fell_back=fell_back,
        )
