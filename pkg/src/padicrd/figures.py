"""Figure rendering for the CLI report paths.

Every plotting function writes a PNG next to the machine-readable
output and returns the path; nothing here is needed by the numerical
library itself.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "save_operator_heatmap",
    "save_spectrum_figure",
    "save_dispersion_figure",
    "save_trajectory_figure",
    "save_convergence_figure",
    "save_replica_figure",
]


def _finish(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_operator_heatmap(op, path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 4))
    vmax = np.abs(op.entries).max() or 1.0
    im = ax.imshow(op.entries, cmap="RdBu_r", vmin=-vmax, vmax=vmax)
    ax.set_title(f"{op.kind} (level {op.level}, p={op.p}, N={op.N})")
    ax.set_xlabel("column site")
    ax.set_ylabel("row site")
    fig.colorbar(im, ax=ax)
    return _finish(fig, path)


def save_spectrum_figure(reports, labels, path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    for k, (report, label) in enumerate(zip(reports, labels)):
        vals = np.asarray(report.eigenvalues)
        ax.plot(vals, np.full_like(vals, k), "o", label=label, alpha=0.7)
    ax.set_yticks(range(len(labels)))
    ax.set_yticklabels(labels)
    ax.set_xlabel("eigenvalue")
    ax.set_title("spectra")
    ax.grid(True, axis="x", alpha=0.3)
    return _finish(fig, path)


def save_dispersion_figure(report, path) -> Path:
    """Growth-rate curve over spatial eigenvalues with the unstable band."""
    from .turing import dispersion

    J = np.array(report.jacobian)
    kappas = [m.kappa for s in report.spaces for m in s.modes]
    lo = min(kappas + ([report.band.kappa1] if report.band else [])) * 1.25 - 0.5
    kk = np.linspace(lo, 0.0, 400)
    growth = [dispersion(J, report.eps, report.d, k)[0].real for k in kk]

    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    ax.plot(kk, growth, "-", color="C0", label="Re lambda_plus(kappa)")
    ax.axhline(0.0, color="k", lw=0.8)
    if report.band is not None:
        ax.axvspan(report.band.kappa1, report.band.kappa2, color="C1", alpha=0.2,
                   label="unstable band")
    markers = {"level": "s", "infinity": "^"}
    for s in report.spaces:
        xs = [m.kappa for m in s.modes]
        ys = [dispersion(J, report.eps, report.d, k)[0].real for k in xs]
        marker = markers["infinity"] if s.space == "infinity" else markers["level"]
        ax.plot(xs, ys, marker, ms=7, alpha=0.8, label=f"{s.space} modes", linestyle="")
    ax.set_xlabel("spatial eigenvalue kappa")
    ax.set_ylabel("growth rate")
    ax.set_title(f"dispersion (eps={report.eps:g}, d={report.d:g})")
    ax.legend(fontsize=8)
    return _finish(fig, path)


def save_trajectory_figure(traj, pattern, path) -> Path:
    grid = traj.grid
    n = grid.embedding.n
    m = grid.sites_per_ball
    cmap = plt.get_cmap("tab10")

    fig, axes = plt.subplots(1, 3, figsize=(13, 4))
    ax = axes[0]
    for s in range(grid.dim):
        ax.plot(traj.times, traj.us[:, s], color=cmap(s // m % 10), lw=0.9)
    ax.set_xlabel("t")
    ax.set_ylabel("u per site")
    ax.set_title("activator trajectories (colored by ball)")

    ax = axes[1]
    x = np.arange(grid.dim)
    ax.bar(x, traj.us[-1], color=[cmap(s // m % 10) for s in range(grid.dim)])
    ax.axhline(traj.steady[0], color="k", ls="--", lw=0.8, label="steady u")
    ax.set_xlabel("site (canonical order)")
    ax.set_title(f"final u pattern: {pattern.verdict}")
    ax.legend(fontsize=8)

    ax = axes[2]
    for mode in pattern.modes:
        amp = np.where(mode.amplitudes > 0, mode.amplitudes, np.nan)
        label = f"{mode.kind} k={mode.eigenvalue:+.3g}"
        if mode.fitted_rate is not None:
            label += f" rate={mode.fitted_rate:.3g}"
        ax.semilogy(pattern.times, amp, lw=1.0, label=label)
    ax.set_xlabel("t")
    ax.set_ylabel("mode amplitude")
    ax.set_title("mode growth")
    ax.legend(fontsize=7)
    return _finish(fig, path)


def save_convergence_figure(report, path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 4))
    gaps = np.array(report.gaps, dtype=float)
    positive = gaps > 0
    ax.semilogy(np.array(report.levels)[positive], gaps[positive], "o-")
    if (~positive).any():
        ax.plot(np.array(report.levels)[~positive],
                np.full((~positive).sum(), gaps[positive].min() if positive.any() else 1e-16),
                "v", color="C2", label="exact zero")
        ax.legend(fontsize=8)
    ax.set_xlabel("refinement level")
    ax.set_ylabel("sup-distance to finest run")
    ax.set_title(f"refinement convergence (t_end={report.t_end:g})")
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def save_replica_figure(report, path) -> Path:
    return save_spectrum_figure(
        [report.spectrum_full, report.spectrum_replica],
        ["full level matrix", "replica stack"],
        path,
    )
