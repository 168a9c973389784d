"""Figure rendering for experiment reports.

Every experiment's report path writes a PNG next to its CSV/JSON records.
All rendering happens on the Agg backend; nothing here opens a window.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .records import ExperimentReport, MetricRecord


def _collect(records: list[MetricRecord], grid_key: str, metric_key: str) -> dict:
    out: dict = {}
    for r in records:
        out.setdefault(r.grid[grid_key], []).append(r.metrics[metric_key])
    return out


def render_lane_changes(report: ExperimentReport, path: Path) -> None:
    by_theta = _collect(report.records, "theta", "lane_change_count")
    thetas = sorted(by_theta)
    means = [np.mean(by_theta[t]) for t in thetas]
    sds = [np.std(by_theta[t]) for t in thetas]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar([f"{t:+.0f}" for t in thetas], means, yerr=sds, color="#4878d0", capsize=4)
    ax.set_xlabel("risk parameter of the planned agent")
    ax.set_ylabel("lane changes per episode")
    ax.set_title("Lane changes vs. risk appetite")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def _matrix_figure(records, metric, reducer, title, cbar_label, path, cmap="viridis"):
    pairs: dict = {}
    for r in records:
        key = (r.grid["theta_a"], r.grid["theta_b"])
        pairs.setdefault(key, []).append(r.metrics[metric])
    tas = sorted({k[0] for k in pairs})
    tbs = sorted({k[1] for k in pairs})
    grid = np.zeros((len(tbs), len(tas)))
    for (ta, tb), vals in pairs.items():
        grid[tbs.index(tb), tas.index(ta)] = reducer(vals)
    fig, ax = plt.subplots(figsize=(6, 5))
    im = ax.imshow(grid, origin="lower", cmap=cmap, aspect="auto")
    ax.set_xticks(range(len(tas)), [f"{t:+.0f}" for t in tas])
    ax.set_yticks(range(len(tbs)), [f"{t:+.0f}" for t in tbs])
    ax.set_xlabel("risk parameter of agent a")
    ax.set_ylabel("risk parameter of agent b")
    ax.set_title(title)
    fig.colorbar(im, ax=ax, label=cbar_label)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_merge_matrix(report: ExperimentReport, path: Path) -> None:
    base = path.with_suffix("")
    _matrix_figure(
        report.records,
        "min_distance_m",
        np.mean,
        "Minimum distance at the merge",
        "mean min distance (m)",
        base.parent / (base.name + "_distance.png"),
    )
    _matrix_figure(
        report.records,
        "yielded",
        lambda vals: np.mean([v == "a" for v in vals]),
        "Yield likelihood of agent a",
        "fraction of seeds where a yielded",
        base.parent / (base.name + "_yield.png"),
        cmap="magma",
    )


def render_baseline_error(report: ExperimentReport, path: Path) -> None:
    by_theta = _collect(report.records, "theta_human", "error_m")
    thetas = sorted(by_theta)
    rmse = [float(np.sqrt(np.mean(np.square(by_theta[t])))) for t in thetas]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(thetas, rmse, marker="o", color="#d65f5f")
    ax.set_xlabel("true human risk parameter")
    ax.set_ylabel("RMSE of min relative distance (m)")
    ax.set_title("Cost of assuming a risk-neutral human")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_kmeans(report: ExperimentReport, path: Path) -> None:
    zs = [r.grid["theta_hat"] for r in report.records]
    scores = [r.metrics["zeta_hat"] for r in report.records]
    labels = [r.metrics["cluster_label"] for r in report.records]
    palette = {
        "very conservative": "#2a5599",
        "conservative": "#74a9cf",
        "aggressive": "#fd8d3c",
        "very aggressive": "#d7301f",
    }
    fig, ax = plt.subplots(figsize=(6, 4))
    for label in palette:
        xs = [s for s, lab in zip(scores, labels) if lab == label]
        ys = [z for z, lab in zip(zs, labels) if lab == label]
        if xs:
            ax.scatter(xs, ys, label=label, color=palette[label], s=40)
    beta0 = report.summary.get("beta0")
    beta1 = report.summary.get("beta1")
    if beta0 is not None and scores:
        grid = np.linspace(min(scores), max(scores), 50)
        ax.plot(grid, beta1 * grid + beta0, "k--", alpha=0.6, label="fitted map")
    ax.set_xlabel("behavior score")
    ax.set_ylabel("risk parameter")
    ax.set_title("Behavior score to risk parameter")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_tde(report: ExperimentReport, path: Path) -> None:
    got = [r.metrics["tde_frames"] for r in report.records]
    expected = [r.metrics["expected_frames"] for r in report.records]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter(expected, got, color="#4878d0")
    lim = max(max(got, default=1), max(expected, default=1)) + 0.5
    ax.plot([0, lim], [0, lim], "k--", alpha=0.5)
    ax.set_xlabel("expected deviation (frames)")
    ax.set_ylabel("measured deviation (frames)")
    ax.set_title("Scripted-maneuver timing deviation")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_user_study(report: ExperimentReport, path: Path, out_dir: Path) -> None:
    from ..sim.trajectory import Trajectory
    from .scenarios import EGO_ID

    fig, axes = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    for ax, label in zip(axes, ("seeking", "averse")):
        csv_path = out_dir / f"user_study_{label}.csv"
        if not csv_path.exists():
            continue
        traj = Trajectory.read_csv(csv_path)
        for agent in traj.agent_ids():
            xs = traj.series(agent, "time_s")
            ys = traj.series(agent, "y_m")
            if agent == EGO_ID:
                ax.plot(xs, ys, color="#d7301f", lw=2, label="planned agent")
            else:
                ax.plot(xs, ys, color="#999999", lw=0.8, alpha=0.7)
        ax.set_ylabel(f"{label}\nlateral position (m)")
        ax.legend(loc="upper right", fontsize=8)
    axes[1].set_xlabel("time (s)")
    fig.suptitle("User-study trajectory pair")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_report(report: ExperimentReport, out_dir) -> list[Path]:
    """Render the figure(s) for a report into its output directory."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    name = report.name
    png = out / f"{name}.png"
    if name == "lane_changes":
        render_lane_changes(report, png)
        return [png]
    if name == "merge_matrix":
        render_merge_matrix(report, png)
        return [
            out / "merge_matrix_distance.png",
            out / "merge_matrix_yield.png",
        ]
    if name == "baseline_error":
        render_baseline_error(report, png)
        return [png]
    if name == "kmeans_fit":
        render_kmeans(report, png)
        return [png]
    if name == "tde_eval":
        render_tde(report, png)
        return [png]
    if name == "user_study_pair":
        render_user_study(report, png, out)
        return [png]
    return []
