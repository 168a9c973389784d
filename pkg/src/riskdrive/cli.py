"""Command-line interface.

Subcommands: simulate, cmetric, calibrate, plan, auction, experiment, serve.
Report paths write CSV/JSON records plus rendered PNG figures into --out;
`experiment` exits non-zero if any of its trend assertions fails.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .behavior.metrics import compute_profile
from .experiments import runner as experiments_runner
from .experiments.figures import render_report
from .experiments.scenarios import EGO_ID, drive_with_planner
from .game.planner import PlannerConfig
from .graph import DEFAULT_MU, GraphHistory
from .risk.clustering import cluster
from .risk.mapping import fit
from .risk.training import TrainingConfig, generate_training_set
from .sim.params import ScenarioConfig, load_scenario_config
from .sim.trajectory import Trajectory
from .sim.world import spawn_population


def _load_config(config_path: str | None, seed: int | None) -> ScenarioConfig:
    config = load_scenario_config(config_path) if config_path else ScenarioConfig()
    if seed is not None:
        from dataclasses import replace

        config = replace(config, seed=seed)
    return config


def _out_dir(out: str) -> Path:
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


@click.group()
def main() -> None:
    """Risk-aware driving simulation and planning toolkit."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", default="out", show_default=True)
@click.option("--dump-graphs", is_flag=True, help="also write per-tick graph JSON")
@click.option("--mu", type=float, default=DEFAULT_MU, show_default=True)
def simulate(config_path, seed, out, dump_graphs, mu) -> None:
    """Run the car-following simulation and export the trajectory CSV."""
    from .sim.world import step

    config = _load_config(config_path, seed)
    out_path = _out_dir(out)
    world = spawn_population(config)
    trajectory = Trajectory()
    trajectory.record(world)
    history = GraphHistory(mu=mu, reset_capacity=10_000) if dump_graphs else None
    events = []
    graph_lines = []
    for _ in range(config.n_ticks):
        world, tick_events = step(world)
        events.extend(tick_events)
        trajectory.record(world)
        if history is not None:
            ids = sorted(v.id for v in world.vehicles)
            pos = {v.id: (v.x, v.y) for v in world.vehicles}
            graph = history.append([pos[i] for i in ids], ids=ids)
            graph_lines.append(graph.to_json())

    trajectory.write_csv(out_path / "trajectory.csv")
    (out_path / "events.json").write_text(
        json.dumps(
            [
                {"tick": e.tick, "kind": e.kind, "agents": list(e.agents), "data": e.data}
                for e in events
            ],
            indent=2,
        )
    )
    if graph_lines:
        (out_path / "graphs.jsonl").write_text("\n".join(graph_lines) + "\n")
    click.echo(f"wrote {out_path / 'trajectory.csv'} ({config.n_ticks} ticks)")


@main.command()
@click.option("--trajectory", "trajectory_path", type=click.Path(exists=True), required=True)
@click.option("--agent", "agent_ids", type=int, multiple=True, help="agent id(s); default all")
@click.option("--mu", type=float, default=DEFAULT_MU, show_default=True)
@click.option("--out", default="out", show_default=True)
def cmetric(trajectory_path, agent_ids, mu, out) -> None:
    """Compute behavior profiles and scores from a trajectory CSV."""
    out_path = _out_dir(out)
    trajectory = Trajectory.read_csv(trajectory_path)
    frames = trajectory.positions_by_frame()
    ticks = sorted(frames)
    history = GraphHistory(mu=mu, reset_capacity=10_000)
    for t in ticks:
        ids = sorted(frames[t])
        history.append([frames[t][i] for i in ids], ids=ids)
    times = sorted({r.time_s for r in trajectory.rows})
    dt = times[1] - times[0] if len(times) > 1 else 1.0
    targets = list(agent_ids) or trajectory.agent_ids()
    scores = {}
    for agent in targets:
        profile = compute_profile(history, agent, dt=dt)
        profile.write_json(out_path / f"profile_{agent}.json")
        scores[agent] = profile.scalar_or_none()
    (out_path / "scores.json").write_text(json.dumps(scores, indent=2))
    for agent, score in scores.items():
        click.echo(f"agent {agent}: zeta = {score}")


@main.command()
@click.option("--out", default="out", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--quick/--full", default=True, show_default=True,
              help="small grid for minutes-scale runs vs the full 21-point grid")
def calibrate(out, seed, quick) -> None:
    """Fit the behavior-to-risk mapping from fresh rollouts."""
    out_path = _out_dir(out)
    if quick:
        training = TrainingConfig(
            theta_grid=(-5.0, -4.0, -2.0, 0.0, 2.0, 4.0, 5.0),
            densities=(10, 14),
            lane_counts=(3,),
            duration=15.0,
            seed=seed,
        )
    else:
        training = TrainingConfig(seed=seed)
    pairs = generate_training_set(training)
    mapping = fit(pairs)
    clusters = cluster([t for _, t in pairs], seed=seed)
    mapping.write_json(out_path / "mapping.json")
    (out_path / "clusters.csv").write_text(clusters.to_csv())
    from .experiments.records import ExperimentReport, MetricRecord

    records = [
        MetricRecord(
            "kmeans_fit",
            seed,
            {"theta_hat": t},
            {"zeta_hat": z, "cluster_label": clusters.label_of(t)},
        )
        for z, t in pairs
    ]
    figure_report = ExperimentReport(
        "kmeans_fit", records, [], {"beta0": mapping.beta0, "beta1": mapping.beta1}
    )
    render_report(figure_report, out_path)
    click.echo(
        f"fitted mapping: beta1={mapping.beta1:.3f}, beta0={mapping.beta0:.3f} "
        f"({len(pairs)} pairs) -> {out_path / 'mapping.json'}"
    )


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--theta", type=float, default=0.0, show_default=True)
@click.option("--out", default="out", show_default=True)
def plan(config_path, seed, theta, out) -> None:
    """Drive one planner-controlled episode through seeded traffic."""
    config = _load_config(config_path, seed)
    out_path = _out_dir(out)
    result = drive_with_planner(config, PlannerConfig(), theta_ego=theta)
    result.trajectory.write_csv(out_path / "plan_trajectory.csv")
    metrics = {
        "theta": theta,
        "lane_changes": result.ego_lane_changes,
        "overtakes": result.overtakes,
        "planner_fallbacks": result.planner_fallbacks,
        "ego_id": EGO_ID,
    }
    (out_path / "plan_metrics.json").write_text(json.dumps(metrics, indent=2))
    click.echo(json.dumps(metrics))


@main.command()
@click.option("--instance", "instance_path", type=click.Path(exists=True), required=True)
@click.option("--out", default="out", show_default=True)
def auction(instance_path, out) -> None:
    """Allocate a turn ordering and machine-check the mechanism guarantees."""
    from .auction import (
        allocate,
        check_incentive_compatibility,
        check_welfare_optimality,
        load_instance,
    )

    out_path = _out_dir(out)
    instance = load_instance(instance_path)
    result = allocate(instance.bids, instance.times)
    ic_reports = [
        json.loads(check_incentive_compatibility(instance, agent).to_json())
        for agent in range(instance.k_slots)
    ]
    welfare = json.loads(check_welfare_optimality(instance).to_json())
    payload = {
        "ordering": list(result.ordering),
        "utilities": list(result.utilities),
        "welfare": result.welfare,
        "incentive_compatibility": ic_reports,
        "welfare_optimality": welfare,
    }
    (out_path / "auction_report.json").write_text(json.dumps(payload, indent=2))
    all_ok = welfare["optimal"] and all(r["dominant"] for r in ic_reports)
    click.echo(f"ordering={result.ordering} welfare={result.welfare:.4f} checks_ok={all_ok}")
    if not all_ok:
        sys.exit(1)


@main.command()
@click.argument("name", type=click.Choice(sorted(experiments_runner.EXPERIMENTS)))
@click.option("--out", default="out", show_default=True)
@click.option("--seed", type=int, default=None, help="base seed (experiment-specific default)")
@click.option("--seeds", "n_seeds", type=int, default=20, show_default=True)
@click.option("--quick", is_flag=True, help="trimmed grids for fast runs")
def experiment(name, out, seed, n_seeds, quick) -> None:
    """Run one named experiment; exit 0 only if its assertions pass."""
    out_path = _out_dir(out)
    if name == "lane_changes":
        grid = (-3.0, 3.0) if quick else (-3.0, -1.0, 0.0, 1.0, 3.0)
        report = experiments_runner.run_lane_change_study(theta_grid=grid, n_seeds=n_seeds)
    elif name in ("merge_distance", "merge_yield"):
        grid = (-3.0, 0.0, 3.0) if quick else (-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0)
        report = experiments_runner.run_merge_matrix(theta_grid=grid, n_seeds=n_seeds)
    elif name == "baseline_error":
        report = experiments_runner.run_baseline_error(n_seeds=n_seeds)
    elif name == "kmeans_fit":
        report = experiments_runner.run_kmeans_fit(quick=quick)
    elif name == "user_study_pair":
        kwargs = {"seed": seed} if seed is not None else {}
        report = experiments_runner.export_user_study_pair(out_path, **kwargs)
    elif name == "tde_eval":
        report = experiments_runner.run_tde_eval(seed=seed or 0)
    else:  # pragma: no cover - guarded by click.Choice
        raise click.UsageError(f"unknown experiment {name}")

    paths = report.write(out_path)
    figures = render_report(report, out_path)
    for label, ok, detail in report.assertions:
        click.echo(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
    click.echo(f"records: {paths['records_csv']}")
    for fig in figures:
        click.echo(f"figure: {fig}")
    if not report.passed:
        sys.exit(1)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8700, show_default=True)
def serve(host, port) -> None:
    """Run the realtime session service (websocket JSON protocol v1)."""
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
