"""Figure rendering for campaign outputs (PNG files next to the CSV/JSON).

Angles are shown in degrees here; everything upstream stays in radians.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

DEG = 180.0 / math.pi


def plot_sweep(result, path) -> None:
    """Landing scatter of the command grid, colored by damping."""
    fig, ax = plt.subplots(figsize=(7, 5))
    for e in result.dataset:
        xs = [t.landing.x for t in e.trials if t.valid]
        ths = [t.landing.theta * DEG for t in e.trials if t.valid]
        sc = ax.scatter(xs, ths, c=[e.command.damping] * len(xs), cmap="viridis",
                        vmin=0.0, vmax=1.0, s=14 + 26 * (e.command.speed - 0.7) / 0.6,
                        alpha=0.75, linewidths=0)
    cbar = fig.colorbar(sc, ax=ax)
    cbar.set_label("damping")
    ax.set_xlabel("landing x [m]")
    ax.set_ylabel("landing angle [deg]")
    ax.set_title(f"{len(result.dataset)} commands x {result.reps} trials")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def _error_curve(ax, run, label, color):
    its = [l.iteration for l in run.result.iterations]
    errs = [l.error for l in run.result.iterations]
    ax.plot(its, errs, "o-", color=color, label=label)


def plot_learning(run, path) -> None:
    """Error trace plus landing scatter against the tolerance box."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.axhline(math.sqrt(2.0), color="gray", ls="--", lw=1, label="unit tolerance diagonal")
    _error_curve(ax1, run, f"model {run.model}", "tab:blue")
    ax1.set_xlabel("iteration")
    ax1.set_ylabel("normalized error of mean landing")
    ax1.legend()
    ax1.grid(alpha=0.3)

    t = run.target
    for e in run.support:
        ax2.scatter([x.landing.x for x in e.trials], [x.landing.theta * DEG for x in e.trials],
                    color="lightgray", s=16, label=None)
    cmap = plt.get_cmap("viridis")
    n = max(len(run.result.iterations), 1)
    for i, l in enumerate(run.result.iterations):
        pts = [p for p in l.trial_landings if p is not None]
        ax2.scatter([p.x for p in pts], [p.theta * DEG for p in pts],
                    color=cmap(i / n), s=24, label=f"iter {l.iteration}")
    ax2.add_patch(plt.Rectangle((t.x - t.eps_x, (t.theta - t.eps_theta) * DEG),
                                2 * t.eps_x, 2 * t.eps_theta * DEG,
                                fill=False, edgecolor="tab:green", lw=1.5))
    ax2.plot([t.x], [t.theta * DEG], "+", color="tab:green", ms=12)
    ax2.set_xlabel("landing x [m]")
    ax2.set_ylabel("landing angle [deg]")
    ax2.legend(fontsize=7, ncol=2)
    ax2.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_compare(report, path) -> None:
    """Per-target mean iterations-to-threshold and first-iteration errors."""
    summary = report.summary()
    per_target = summary["per_target"]
    labels = [
        f"({t['target']['x']:.2f}, {t['target']['theta_rad'] * DEG:.0f}\N{DEGREE SIGN})"
        for t in per_target
    ]
    x = np.arange(len(per_target))
    width = 0.38

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for off, model, color in ((-width / 2, "m1", "tab:orange"), (width / 2, "m2", "tab:blue")):
        ax1.bar(x + off, [t[model]["mean_iters_to_2_of_n"] for t in per_target],
                width, label=model, color=color)
        ax2.bar(x + off, [t[model]["mean_first_iteration_error"] for t in per_target],
                width, label=model, color=color)
    for ax, ylabel in ((ax1, "mean iterations to 2-of-N"), (ax2, "mean first-iteration error")):
        ax.set_xticks(x)
        ax.set_xticklabels(labels, fontsize=8)
        ax.set_ylabel(ylabel)
        ax.legend()
        ax.grid(alpha=0.3, axis="y")
    red = summary["pooled"]["reduction_pct_2_of_n"]
    fig.suptitle(f"paired study over {len(summary['seeds'])} seeds; pooled reduction {red:.0f}%")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_transfer(report, path) -> None:
    """Per-seed iterations-to-success for transfer vs scratch learning."""
    summary = report.summary()
    m3 = summary["iters_to_all_n"]["m3"]
    m2 = summary["iters_to_all_n"]["m2_scratch"]
    x = np.arange(len(m3))

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.plot(x, m2, "s--", color="tab:orange", label="from scratch")
    ax1.plot(x, m3, "o-", color="tab:blue", label="transfer bootstrap")
    ax1.axhline(summary["censored_at"], color="gray", lw=1, ls=":", label="never reached")
    ax1.set_xlabel("paired seed index")
    ax1.set_ylabel("iterations to all-N success")
    ax1.legend()
    ax1.grid(alpha=0.3)

    bins = np.arange(0.5, summary["censored_at"] + 1.5)
    ax2.hist([m2, m3], bins=bins, label=["from scratch", "transfer bootstrap"],
             color=["tab:orange", "tab:blue"])
    ax2.set_xlabel("iterations to all-N success")
    ax2.set_ylabel("runs")
    ax2.legend()
    red = summary["reduction_pct"]
    frac = 100.0 * summary["m3_strictly_fewer_fraction"]
    fig.suptitle(f"CoM shift {summary['dh']*100:.0f} cm: reduction {red:.0f}%, "
                 f"transfer faster in {frac:.0f}% of pairs")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
