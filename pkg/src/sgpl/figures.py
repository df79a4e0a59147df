"""Figure rendering for the CLI report paths.

Every report command writes its delimited output first; these helpers
render a companion PNG next to it.  The CSVs stay the primary interface
(each figure is derived from data that is also on disk), so skipping
figure rendering never loses information.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from sgpl.harness import FitFileResult, MetricsRow, ReplicateRecord, TimingRow
from sgpl.pairsample import PairSet

__all__ = [
    "render_pair_map",
    "render_estimate_spread",
    "render_relative_efficiency",
    "render_timing",
    "render_fit_runs",
]


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_pair_map(coords: np.ndarray, pairset: PairSet, path: str | Path) -> Path:
    """All points in light grey, selected pairs linked and highlighted."""
    coords = np.asarray(coords, dtype=np.float64)
    fig, ax = plt.subplots(figsize=(7, 7))
    ax.scatter(coords[:, 0], coords[:, 1], s=2, c="0.8", linewidths=0, label="points")
    for i, l, _cell in pairset.pairs:
        ax.plot(
            [coords[i, 0], coords[l, 0]],
            [coords[i, 1], coords[l, 1]],
            "-",
            color="tab:red",
            linewidth=0.8,
        )
    chosen = np.asarray(
        [[coords[i, 0], coords[i, 1]] for i, _, _ in pairset.pairs]
        + [[coords[l, 0], coords[l, 1]] for _, l, _ in pairset.pairs]
    )
    if chosen.size:
        ax.scatter(chosen[:, 0], chosen[:, 1], s=6, c="tab:blue", linewidths=0, label="pair members")
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(f"selected pairs (q={pairset.q})")
    ax.legend(loc="upper right", fontsize=8)
    return _save(fig, path)


def render_estimate_spread(replicates: list[ReplicateRecord], path: str | Path) -> Path:
    """Replicate spread of the slope and spatial-correlation estimates per cell."""
    cells: dict[int, list[ReplicateRecord]] = {}
    for r in replicates:
        cells.setdefault(r.scenario_index, []).append(r)
    indices = sorted(cells)
    labels = [
        f"n={cells[i][0].n}\nlam={cells[i][0].lambda_sem:g}\n{cells[i][0].pattern}"
        for i in indices
    ]
    fig, axes = plt.subplots(1, 2, figsize=(max(6, 2 * len(indices) + 2), 4.5))
    for ax, attr, title in (
        (axes[0], "beta1", "slope estimates"),
        (axes[1], "lam", "spatial correlation estimates"),
    ):
        series = [[getattr(r, attr) for r in cells[i]] for i in indices]
        ax.boxplot(series, tick_labels=labels)
        ax.set_title(title)
        ax.tick_params(axis="x", labelsize=7)
        if attr == "lam":
            # Mark the generating spatial parameter for orientation; the
            # pairwise correlation is a related but different quantity.
            for pos, i in enumerate(indices, start=1):
                ax.plot(pos, cells[i][0].lambda_sem, "r_", markersize=14)
    fig.tight_layout()
    return _save(fig, path)


def render_relative_efficiency(rows: list[MetricsRow], path: str | Path) -> Path:
    """Benchmark-vs-sampled relative efficiency per parameter (log scale)."""
    with_re = [m for m in rows if m.re_beta1 is not None]
    fig, ax = plt.subplots(figsize=(max(6, 1.4 * len(with_re) + 2), 4.5))
    if with_re:
        pos = np.arange(len(with_re), dtype=float)
        width = 0.27
        ax.bar(pos - width, [m.re_beta1 for m in with_re], width, label="slope")
        ax.bar(pos, [m.re_lambda for m in with_re], width, label="spatial param")
        ax.bar(pos + width, [m.re_sigma2 for m in with_re], width, label="variance")
        ax.set_yscale("log")
        ax.axhline(1.0, color="k", linestyle="--", linewidth=0.8)
        ax.set_xticks(pos)
        ax.set_xticklabels(
            [f"n={m.n}\nlam={m.lambda_sem:g}\n{m.pattern}" for m in with_re], fontsize=7
        )
        ax.legend(fontsize=8)
    else:
        ax.text(0.5, 0.5, "no benchmark results", ha="center", va="center")
    ax.set_ylabel("benchmark MSE / sampled MSE")
    ax.set_title("relative efficiency (values > 1 favor the sampled estimator)")
    fig.tight_layout()
    return _save(fig, path)


def render_timing(rows: list[TimingRow], path: str | Path) -> Path:
    """Wall times and speed-up ratio against dataset size (log axes)."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4.5))
    ns = [r.n for r in rows]
    ax1.plot(ns, [r.time_benchmark_ms for r in rows], "o-", label="dense ML benchmark")
    ax1.plot(ns, [r.mean_time_sgpl_ms for r in rows], "s-", label="sampled estimator")
    ax1.set_yscale("log")
    ax1.set_xlabel("N")
    ax1.set_ylabel("wall time (ms)")
    ax1.legend(fontsize=8)
    ax2.plot(ns, [r.relative_time for r in rows], "o-", color="tab:green")
    ax2.set_yscale("log")
    ax2.set_xlabel("N")
    ax2.set_ylabel("benchmark time / sampled time")
    fig.suptitle("timing comparison")
    fig.tight_layout()
    return _save(fig, path)


def render_fit_runs(result: FitFileResult, path: str | Path) -> Path:
    """Histogram of per-run slope and correlation estimates with their means."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    betas = [r.beta1 for r in result.runs]
    lams = [r.lam for r in result.runs]
    ax1.hist(betas, bins=max(5, min(30, len(betas) // 3)), color="tab:blue", alpha=0.8)
    ax1.axvline(result.beta1_mean, color="k", linestyle="--")
    ax1.set_title("slope per run")
    ax2.hist(lams, bins=max(5, min(30, len(lams) // 3)), color="tab:orange", alpha=0.8)
    ax2.axvline(result.lambda_mean, color="k", linestyle="--")
    ax2.set_title("spatial correlation per run")
    fig.tight_layout()
    return _save(fig, path)
