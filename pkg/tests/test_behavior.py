import math

import numpy as np
import pytest

from riskdrive.behavior import (
    closeness_centrality,
    closeness_series,
    cmetric_scalar,
    compute_profile,
    degree_series,
    eigenvector_centrality,
    eigenvector_series,
    sle_sie,
)
from riskdrive.graph import GraphHistory, build_graph


def floyd_warshall_closeness(positions, mu, cap_factor=10.0):
    """Independent all-pairs shortest-path closeness oracle."""
    pos = np.asarray(positions, dtype=float)
    n = pos.shape[0]
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    for i in range(n):
        for j in range(n):
            if i != j:
                d = np.linalg.norm(pos[i] - pos[j])
                if d < mu:
                    dist[i, j] = d
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if dist[i, k] + dist[k, j] < dist[i, j]:
                    dist[i, j] = dist[i, k] + dist[k, j]
    dist[np.isinf(dist)] = cap_factor * mu
    sums = dist.sum(axis=1)
    return (n - 1) / sums


def power_iteration(A, iters=20_000, tol=1e-15):
    """Independent principal-eigenvector oracle.

    Iterates on A + cI (same eigenvectors, strictly dominant top eigenvalue)
    so near-bipartite adjacencies cannot make the iteration oscillate.
    """
    n = A.shape[0]
    shifted = A + (1.0 + A.sum(axis=1).max()) * np.eye(n)
    v = np.full(n, 1.0 / math.sqrt(n))
    for _ in range(iters):
        w = shifted @ v
        w = w / np.linalg.norm(w)
        if np.linalg.norm(w - v) < tol:
            v = w
            break
        v = w
    if v.sum() < 0:
        v = -v
    return v


def history_from_positions(frames, mu=10.0, **kw):
    hist = GraphHistory(mu=mu, **kw)
    for pos in frames:
        hist.append(pos)
    return hist


# --- closeness ---------------------------------------------------------------


def test_closeness_two_vehicles():
    g = build_graph([(0.0, 0.0), (5.0, 0.0)], mu=10.0)
    zc = closeness_centrality(g)
    assert zc[0] == pytest.approx(0.2)
    assert zc[1] == pytest.approx(0.2)


def test_closeness_complete_triangle():
    # equilateral-ish: all pairwise distances exactly 4
    h = 4.0 * math.sqrt(3) / 2.0
    g = build_graph([(0.0, 0.0), (4.0, 0.0), (2.0, h)], mu=10.0)
    zc = closeness_centrality(g)
    assert np.allclose(zc, 0.25)


def test_closeness_path_graph_matches_floyd_warshall():
    pos = [(0.0, 0.0), (3.0, 0.0), (6.0, 0.0), (9.0, 0.0)]
    g = build_graph(pos, mu=4.0)
    zc = closeness_centrality(g)
    assert np.allclose(zc, floyd_warshall_closeness(pos, mu=4.0))


def test_closeness_random_graphs_match_floyd_warshall():
    rng = np.random.default_rng(21)
    for _ in range(25):
        n = int(rng.integers(2, 9))
        pos = rng.uniform(0, 60, size=(n, 2))
        mu = float(rng.uniform(8, 40))
        g = build_graph(pos, mu=mu)
        assert np.allclose(closeness_centrality(g), floyd_warshall_closeness(pos, mu))


def test_closeness_single_vehicle_is_absent():
    g = build_graph([(0.0, 0.0)], mu=10.0)
    assert math.isnan(closeness_centrality(g)[0])


def test_closeness_unreachable_pairs_use_cap():
    pos = [(0.0, 0.0), (5.0, 0.0), (500.0, 0.0)]
    g = build_graph(pos, mu=10.0)
    zc = closeness_centrality(g)
    assert zc[2] == pytest.approx(2.0 / (2 * 100.0))  # both others at the 10*mu cap
    assert zc[0] == pytest.approx(2.0 / (5.0 + 100.0))


# --- degree -------------------------------------------------------------------


def test_degree_static_cluster_constant():
    frames = [[(0.0, 0.0), (4.0, 0.0), (8.0, 0.0)]] * 5
    hist = history_from_positions(frames, mu=20.0)
    zd = degree_series(hist, 0)
    assert np.array_equal(zd, np.full(5, 2.0))


def test_degree_counts_one_new_encounter_per_tick():
    # agent 0 fixed; vehicle k sits far away and steps inside mu at tick k
    mu = 10.0
    frames = []
    for t in range(4):
        frame = [(0.0, 0.0)]
        for k in range(1, 4):
            frame.append((5.0, 0.0) if k <= t else (1000.0 + 100.0 * k, 100.0 * k))
        frames.append(frame)
    hist = history_from_positions(frames, mu=mu)
    assert np.array_equal(degree_series(hist, 0), np.array([0.0, 1.0, 2.0, 3.0]))


def test_degree_isolated_agent_zero():
    frames = [[(0.0, 0.0), (500.0, 0.0)]] * 4
    hist = history_from_positions(frames, mu=10.0)
    assert np.array_equal(degree_series(hist, 0), np.zeros(4))


def test_degree_monotone_on_random_walks():
    rng = np.random.default_rng(31)
    pos = rng.uniform(0, 50, size=(6, 2))
    hist = GraphHistory(mu=15.0, reset_capacity=32)
    for _ in range(20):
        pos = pos + rng.uniform(-4, 4, size=pos.shape)
        hist.append(pos)
    for agent in range(6):
        zd = degree_series(hist, agent)
        assert np.all(np.diff(zd) >= 0.0)


# --- eigenvector --------------------------------------------------------------


def test_eigenvector_symmetric_pair_equal():
    g = build_graph([(0.0, 0.0), (5.0, 0.0)], mu=10.0)
    ze = eigenvector_centrality(g)
    assert ze[0] == pytest.approx(ze[1])
    assert np.linalg.norm(ze) == pytest.approx(1.0)


def test_eigenvector_star_hub_dominates():
    pos = [(0.0, 0.0), (6.0, 0.0), (-6.0, 0.0), (0.0, 6.0), (0.0, -6.0)]
    g = build_graph(pos, mu=7.0)  # only hub-leaf edges fall under mu
    ze = eigenvector_centrality(g)
    assert ze[0] > max(ze[1:])


def test_eigenvector_matches_power_iteration():
    rng = np.random.default_rng(41)
    for _ in range(20):
        pos = rng.uniform(0, 40, size=(5, 2))
        g = build_graph(pos, mu=25.0)
        if not g.A.any():
            continue
        eigs = np.linalg.eigvalsh(g.A)
        if eigs[-1] - eigs[-2] < 1e-6:
            continue  # principal direction ambiguous, oracle ill-posed
        ze = eigenvector_centrality(g)
        oracle = power_iteration(g.A)
        assert np.allclose(ze, oracle, atol=1e-9)
        # eigenpair residual
        lam = float(ze @ g.A @ ze)
        assert np.allclose(g.A @ ze, lam * ze, atol=1e-8)


def test_eigenvector_zero_adjacency_uniform():
    g = build_graph([(0.0, 0.0), (500.0, 0.0), (900.0, 0.0)], mu=10.0)
    ze = eigenvector_centrality(g)
    assert np.allclose(ze, 1.0 / math.sqrt(3))


def test_translation_invariance_of_all_series():
    rng = np.random.default_rng(51)
    frames = []
    pos = rng.uniform(0, 50, size=(4, 2))
    for _ in range(6):
        pos = pos + rng.uniform(-3, 3, size=pos.shape)
        frames.append(pos.copy())
    shifted = [f + np.array([1234.5, -987.0]) for f in frames]
    h1 = history_from_positions(frames, mu=25.0)
    h2 = history_from_positions(shifted, mu=25.0)
    for agent in range(4):
        assert np.allclose(closeness_series(h1, agent), closeness_series(h2, agent))
        assert np.array_equal(degree_series(h1, agent), degree_series(h2, agent))
        assert np.allclose(
            eigenvector_series(h1, agent), eigenvector_series(h2, agent), atol=1e-9
        )


# --- SLE / SIE ----------------------------------------------------------------


def test_sle_sie_constant_series():
    sle, sie = sle_sie(np.full(10, 3.7), dt=0.5)
    assert np.all(sle == 0.0)
    assert np.all(sie == 0.0)


def test_sle_sie_linear_ramp():
    t = np.arange(8) * 0.25
    sle, sie = sle_sie(2.0 * t, dt=0.25)
    assert np.allclose(sle, 2.0)
    assert np.allclose(sie, 0.0, atol=1e-12)


def test_sie_quadratic_exact_identity():
    t = np.arange(9, dtype=float)
    sle, sie = sle_sie(t**2, dt=1.0)
    assert np.allclose(sie, 2.0)  # central second difference of t^2 is exact
    assert np.allclose(sle[1:-1], 2.0 * t[1:-1])


def test_sle_sie_requires_three_samples():
    with pytest.raises(ValueError):
        sle_sie(np.array([1.0, 2.0]), dt=1.0)


# --- scalar -------------------------------------------------------------------


def test_cmetric_scalar_zero_for_constant_centralities():
    frames = [[(0.0, 0.0), (4.0, 0.0), (8.0, 0.0)]] * 6
    hist = history_from_positions(frames, mu=20.0)
    profile = compute_profile(hist, 0, dt=0.1)
    assert cmetric_scalar(profile) == 0.0


def test_cmetric_scalar_window_dominance():
    # same histories except one has strictly larger closeness swings
    calm = [[(0.0, 0.0), (10.0 + 0.1 * t, 0.0)] for t in range(8)]
    wild = [[(0.0, 0.0), (10.0 + 2.5 * t, 0.0)] for t in range(8)]
    z_calm = cmetric_scalar(compute_profile(history_from_positions(calm, mu=50.0), 0, dt=0.1))
    z_wild = cmetric_scalar(compute_profile(history_from_positions(wild, mu=50.0), 0, dt=0.1))
    assert z_wild > z_calm


def test_overtake_scores_higher_than_lane_keeping():
    # scripted traffic: two steady vehicles ahead; the subject either keeps
    # its distant station or barrels past both
    dt = 0.1
    frames_keep, frames_pass = [], []
    for t in range(40):
        traffic = [(60.0 + 20.0 * dt * t, 0.0), (90.0 + 20.0 * dt * t, 4.0)]
        keep = (0.0 + 20.0 * dt * t, 0.0)
        rush = (0.0 + 45.0 * dt * t, 4.0)
        frames_keep.append([keep] + traffic)
        frames_pass.append([rush] + traffic)
    z_keep = cmetric_scalar(
        compute_profile(history_from_positions(frames_keep, mu=50.0), 0, dt=dt)
    )
    z_pass = cmetric_scalar(
        compute_profile(history_from_positions(frames_pass, mu=50.0), 0, dt=dt)
    )
    assert z_pass > z_keep


def test_compute_profile_window_bounds_checked():
    frames = [[(0.0, 0.0), (4.0, 0.0)]] * 4
    hist = history_from_positions(frames)
    with pytest.raises(ValueError):
        compute_profile(hist, 0, dt=0.1, window=(0, 10))
