"""Matplotlib renderings written next to the delimited/JSON outputs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def render_run_overview(manifest: dict, path) -> None:
    """Two panels: per-level traversal outcome and per-phase wall clock."""
    fig, (ax_levels, ax_time) = plt.subplots(1, 2, figsize=(10, 4))

    levels = manifest["traversal"]["levels"]
    depths = sorted(levels, key=int)
    visited = [levels[d]["visited"] for d in depths]
    under = [levels[d]["skipped_underfed"] for d in depths]
    over = [levels[d]["skipped_overfed"] for d in depths]
    xs = range(len(depths))
    ax_levels.bar(xs, visited, label="evaluated")
    ax_levels.bar(xs, under, bottom=visited, label="skipped (underfed)")
    ax_levels.bar(xs, over, bottom=[v + u for v, u in zip(visited, under)],
                  label="skipped (overfed)")
    ax_levels.set_xticks(list(xs), depths)
    ax_levels.set_xlabel("tree depth")
    ax_levels.set_ylabel("candidates")
    ax_levels.set_title("candidate traversal")
    ax_levels.legend(fontsize=8)

    phases = manifest["timing"]["phases"]
    names = list(phases)
    ax_time.barh(range(len(names)), [phases[n] for n in names])
    ax_time.set_yticks(range(len(names)), names)
    ax_time.set_xlabel("seconds")
    ax_time.set_title("phase wall clock")

    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_sweep_overview(rows: list[dict], path) -> None:
    """Distribution of the quality metrics over all sweep rows."""
    metrics = ["fitness", "precision", "activity_coverage", "simplicity", "f1", "hm"]
    data = [[float(row[m]) for row in rows] for m in metrics]
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.boxplot(data)
    ax.set_xticks(range(1, len(metrics) + 1), metrics)
    ax.set_ylim(-0.05, 1.05)
    ax.set_ylabel("score")
    ax.set_title(f"quality over {len(rows)} runs")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_coverage_by_metric(rows: list[dict], path) -> None:
    """Rate of full-activity-coverage models per fitness metric."""
    metrics = sorted({row["metric"] for row in rows})
    rates = []
    for metric in metrics:
        group = [row for row in rows if row["metric"] == metric]
        full = sum(1 for row in group if float(row["activity_coverage"]) == 1.0)
        rates.append(full / len(group) if group else 0.0)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.bar(range(len(metrics)), rates)
    ax.set_xticks(range(len(metrics)), metrics)
    ax.set_ylim(0, 1)
    ax.set_ylabel("share of runs with coverage 1")
    ax.set_title("full activity coverage by fitness metric")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
