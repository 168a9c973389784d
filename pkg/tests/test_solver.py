import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from riskdrive.game import (
    EquilibriumError,
    LQGame,
    game_from_json,
    game_to_json,
    rollout,
    solve_nash,
    solve_nash_strict,
)
from lq_oracles import lqr_affine, random_nash_game, risk_neutral_nash


def single_player_game(rng, n=3, m=2, T=6, noise=0.0, theta=0.0):
    As, Bs, Ws, Qs, ls, Rs = random_nash_game(
        rng, n_players=1, state_dim=n, horizon=T, control_dims=[m], noise=noise
    )
    return LQGame(A=As, B=Bs, W=Ws, Q=Qs, l=ls, R=Rs, thetas=[theta])


def test_risk_neutral_single_player_matches_lqr():
    rng = np.random.default_rng(1)
    for trial in range(20):
        n, m, T = int(rng.integers(1, 5)), int(rng.integers(1, 3)), int(rng.integers(1, 9))
        A = rng.uniform(-1, 1, size=(n, n)) * 0.8
        B = rng.uniform(-1, 1, size=(n, m))
        Mq = rng.uniform(-1, 1, size=(n, n))
        Q = Mq @ Mq.T * 0.5
        l = rng.uniform(-1, 1, size=n)
        Mr = rng.uniform(-1, 1, size=(m, m))
        R = Mr @ Mr.T + np.eye(m)
        game = LQGame.time_invariant(
            A=A, B=[B], W=np.zeros((n, n)), Q=[Q], l=[l], R=[[R]], thetas=[0.0], horizon=T
        )
        solution = solve_nash(game)
        assert not solution.breakdown_flag
        K_ref, k_ref = lqr_affine(A, B, Q, l, R, T)
        for t in range(T):
            assert np.allclose(solution.K[0][t], K_ref[t], atol=1e-9), trial
            assert np.allclose(solution.k[0][t], k_ref[t], atol=1e-9), trial


def test_risk_neutral_multiplayer_matches_independent_nash():
    rng = np.random.default_rng(2)
    for trial in range(30):
        N = int(rng.integers(1, 4))
        n = int(rng.integers(1, 5))
        T = int(rng.integers(1, 11))
        As, Bs, Ws, Qs, ls, Rs = random_nash_game(
            rng, n_players=N, state_dim=n, horizon=T, noise=0.1
        )
        game = LQGame(A=As, B=Bs, W=Ws, Q=Qs, l=ls, R=Rs, thetas=np.zeros(N))
        solution = solve_nash(game)
        K_ref, k_ref = risk_neutral_nash(As, Bs, Qs, ls, Rs)
        for i in range(N):
            assert np.allclose(solution.K[i], K_ref[i], atol=1e-9), trial
            assert np.allclose(solution.k[i], k_ref[i], atol=1e-9), trial


def test_zero_noise_gains_exactly_theta_invariant():
    rng = np.random.default_rng(3)
    As, Bs, Ws, Qs, ls, Rs = random_nash_game(rng, n_players=2, noise=0.0)
    solutions = [
        solve_nash(LQGame(A=As, B=Bs, W=Ws, Q=Qs, l=ls, R=Rs, thetas=[t1, t2]))
        for t1, t2 in ((0.0, 0.0), (3.0, -3.0), (-5.0, 5.0))
    ]
    for other in solutions[1:]:
        for i in range(2):
            assert np.array_equal(solutions[0].K[i], other.K[i])
            assert np.array_equal(solutions[0].k[i], other.k[i])


def quadrature_entropic_cost(theta, qT, lT, mean, var):
    """Entropic risk of 0.5*qT*x^2 + lT*x for x ~ N(mean, var), by quadrature."""
    sd = math.sqrt(var)

    def integrand(w):
        x = mean + w
        cost = 0.5 * qT * x * x + lT * x
        return math.exp(theta * cost) * math.exp(-w * w / (2 * var)) / math.sqrt(2 * math.pi * var)

    val, _ = quad(integrand, -10 * sd, 10 * sd, limit=200)
    return math.log(val) / theta


def test_scalar_two_player_one_step_matches_grid_search():
    # 1-D state, horizon 1: each player picks one control; the solver's
    # equilibrium must match a brute-force fixed point of best responses
    # computed with quadrature-based entropic risk.
    a, b1, b2 = 1.1, 0.9, -0.7
    w_var = 0.4
    q1, q2 = 2.0, 1.5
    l1, l2 = 0.3, -0.2
    r1, r2 = 1.0, 1.3
    theta1, theta2 = 0.8, -0.9
    x0 = 1.7

    game = LQGame(
        A=np.array([[[a]]]),
        B=[np.array([[[b1]]]), np.array([[[b2]]])],
        W=np.array([[[w_var]]]),
        Q=[np.array([[[0.0]], [[q1]]]), np.array([[[0.0]], [[q2]]])],
        l=[np.array([[0.0], [l1]]), np.array([[0.0], [l2]])],
        R=[
            [np.array([[[r1]]]), np.zeros((1, 1, 1))],
            [np.zeros((1, 1, 1)), np.array([[[r2]]])],
        ],
        thetas=[theta1, theta2],
    )
    solution = solve_nash_strict(game)
    controls = solution.control(0, np.array([x0]))
    u1_solver = float(controls[0][0])
    u2_solver = float(controls[1][0])

    def risk(player, u1, u2):
        mean = a * x0 + b1 * u1 + b2 * u2
        if player == 0:
            control = 0.5 * r1 * u1 * u1
            return control + quadrature_entropic_cost(theta1, q1, l1, mean, w_var)
        control = 0.5 * r2 * u2 * u2
        return control + quadrature_entropic_cost(theta2, q2, l2, mean, w_var)

    # coarse grid scan for the simultaneous best-response pair, then refine
    grid = np.linspace(-6.0, 6.0, 25)
    br1 = {u2: min(grid, key=lambda u: risk(0, u, u2)) for u2 in grid}
    br2 = {u1: min(grid, key=lambda u: risk(1, u1, u)) for u1 in grid}
    best_pair = min(
        ((u1, u2) for u1 in grid for u2 in grid),
        key=lambda pair: abs(br1[pair[1]] - pair[0]) + abs(br2[pair[0]] - pair[1]),
    )
    u1, u2 = best_pair
    for _ in range(60):
        u1 = minimize_scalar(lambda u: risk(0, u, u2), bounds=(-8, 8), method="bounded").x
        u2 = minimize_scalar(lambda u: risk(1, u1, u), bounds=(-8, 8), method="bounded").x
    assert u1_solver == pytest.approx(u1, abs=1e-3)
    assert u2_solver == pytest.approx(u2, abs=1e-3)


def test_breakdown_flag_when_theta_scaled_up():
    rng = np.random.default_rng(5)
    game0 = single_player_game(rng, noise=0.5, theta=0.0)
    flagged = False
    for theta in (0.1, 0.5, 2.0, 10.0, 50.0, 250.0):
        game = LQGame(
            A=game0.A, B=game0.B, W=game0.W, Q=game0.Q, l=game0.l, R=game0.R, thetas=[theta]
        )
        solution = solve_nash(game)
        if solution.breakdown_flag:
            flagged = True
            assert solution.breakdown_t is not None
            assert solution.K is None
            break
        for Ki in solution.K:
            assert np.all(np.isfinite(Ki))
    assert flagged


def test_risk_seeking_does_not_break_down():
    rng = np.random.default_rng(6)
    game0 = single_player_game(rng, noise=0.5)
    for theta in (-0.1, -2.0, -50.0):
        game = LQGame(
            A=game0.A, B=game0.B, W=game0.W, Q=game0.Q, l=game0.l, R=game0.R, thetas=[theta]
        )
        assert not solve_nash(game).breakdown_flag


def test_doubling_linear_terms_doubles_offsets():
    rng = np.random.default_rng(7)
    As, Bs, Ws, Qs, ls, Rs = random_nash_game(rng, n_players=2, noise=0.0)
    base = solve_nash(LQGame(A=As, B=Bs, W=Ws, Q=Qs, l=ls, R=Rs, thetas=[0.0, 0.0]))
    doubled = solve_nash(
        LQGame(A=As, B=Bs, W=Ws, Q=Qs, l=[2 * l for l in ls], R=Rs, thetas=[0.0, 0.0])
    )
    for i in range(2):
        assert np.allclose(base.K[i], doubled.K[i], atol=1e-12)
        assert np.allclose(2.0 * base.k[i], doubled.k[i], atol=1e-9)


def test_json_round_trip_preserves_game():
    rng = np.random.default_rng(8)
    As, Bs, Ws, Qs, ls, Rs = random_nash_game(rng, n_players=2, noise=0.2)
    game = LQGame(A=As, B=Bs, W=Ws, Q=Qs, l=ls, R=Rs, thetas=[1.5, -0.5])
    again = game_from_json(game_to_json(game))
    assert np.array_equal(game.A, again.A)
    assert np.array_equal(game.W, again.W)
    for i in range(2):
        assert np.array_equal(game.B[i], again.B[i])
        assert np.array_equal(game.Q[i], again.Q[i])
        assert np.array_equal(game.l[i], again.l[i])
    sol_a = solve_nash(game)
    sol_b = solve_nash(again)
    for i in range(2):
        assert np.array_equal(sol_a.K[i], sol_b.K[i])


def test_validation_rejects_bad_matrices():
    n, T = 2, 3
    A = np.tile(np.eye(n), (T, 1, 1))
    B = [np.tile(np.ones((n, 1)), (T, 1, 1))]
    W = np.tile(np.eye(n), (T, 1, 1))
    Q_bad = [np.tile(-np.eye(n), (T + 1, 1, 1))]
    l = [np.zeros((T + 1, n))]
    R = [[np.tile(np.eye(1), (T, 1, 1))]]
    with pytest.raises(ValueError):
        LQGame(A=A, B=B, W=W, Q=Q_bad, l=l, R=R, thetas=[0.0])
    R_bad = [[np.tile(np.zeros((1, 1)), (T, 1, 1))]]
    Q = [np.tile(np.eye(n), (T + 1, 1, 1))]
    with pytest.raises(ValueError):
        LQGame(A=A, B=B, W=W, Q=Q, l=l, R=R_bad, thetas=[0.0])
