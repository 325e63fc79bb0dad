"""Figure rendering for run artifacts.

Reads the delimited outputs of a run directory (``trajectory.csv``,
``snapshot_*.csv``, ``final.csv``, ``summary.json``) and renders matplotlib
figures next to them.  The CSVs remain the canonical record; figures are a
convenience layer and nothing in the solvers depends on this module.
"""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _load_csv(path):
    return np.genfromtxt(path, delimiter=",", names=True)


def render_trajectory(run_dir, out_path=None) -> Path:
    """Semilog decay of the sup-norm plus energy and constraint traces."""
    run_dir = Path(run_dir)
    data = _load_csv(run_dir / "trajectory.csv")
    data = np.atleast_1d(data)
    out_path = Path(out_path) if out_path else run_dir / "trajectory.png"

    fig, axes = plt.subplots(1, 2, figsize=(10.0, 3.6))
    ax = axes[0]
    positive = data["sup_norm"] > 0
    ax.semilogy(data["t"][positive], data["sup_norm"][positive], lw=1.2)
    ax.set_xlabel("t")
    ax.set_ylabel("sup norm")
    ax.set_title("profile decay")
    ax.grid(alpha=0.3)

    ax = axes[1]
    ax.plot(data["t"], data["tv_energy"], lw=1.2, label="TV energy")
    ax.plot(data["t"], data["hminus1_norm"], lw=1.2, label="dual-Sobolev norm")
    ax.plot(data["t"], data["constraint_gap"], lw=1.0, ls="--", label="constraint gap")
    ax.set_xlabel("t")
    ax.legend(fontsize=8)
    ax.set_title("diagnostics")
    ax.grid(alpha=0.3)

    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def _snapshot_paths(run_dir: Path):
    paths = sorted(run_dir.glob("snapshot_*.csv"))
    final = run_dir / "final.csv"
    if final.exists():
        paths.append(final)
    return paths


def render_profiles(run_dir, out_path=None, max_curves: int = 8) -> Path | None:
    """Overlay 1D profile snapshots, or tile 2D snapshots as heat maps."""
    run_dir = Path(run_dir)
    paths = _snapshot_paths(run_dir)
    if not paths:
        return None
    out_path = Path(out_path) if out_path else run_dir / "profiles.png"
    first = _load_csv(paths[0])
    is_2d = "y" in (first.dtype.names or ())
    if len(paths) > max_curves:
        idx = np.linspace(0, len(paths) - 1, max_curves).round().astype(int)
        paths = [paths[i] for i in sorted(set(idx))]

    if not is_2d:
        fig, ax = plt.subplots(figsize=(7.0, 4.0))
        for path in paths:
            data = _load_csv(path)
            ax.plot(data["x"], data["u"], lw=1.0, label=path.stem)
        ax.set_xlabel("x")
        ax.set_ylabel("u")
        ax.legend(fontsize=7)
        ax.set_title("profiles")
        fig.tight_layout()
        fig.savefig(out_path, dpi=150)
        plt.close(fig)
        return out_path

    ncols = min(len(paths), 4)
    nrows = (len(paths) + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(3.2 * ncols, 2.8 * nrows), squeeze=False)
    for k, path in enumerate(paths):
        ax = axes[k // ncols][k % ncols]
        data = _load_csv(path)
        xs = np.unique(data["x"])
        ys = np.unique(data["y"])
        grid = data["u"].reshape(len(ys), len(xs))
        im = ax.imshow(
            grid,
            origin="lower",
            extent=(xs.min(), xs.max(), ys.min(), ys.max()),
            aspect="auto",
            cmap="viridis",
        )
        ax.set_title(path.stem, fontsize=8)
        fig.colorbar(im, ax=ax, shrink=0.8)
    for k in range(len(paths), nrows * ncols):
        axes[k // ncols][k % ncols].axis("off")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_run(run_dir) -> list:
    """Render every available figure for a run directory; returns written paths."""
    run_dir = Path(run_dir)
    written = []
    if (run_dir / "trajectory.csv").exists():
        written.append(render_trajectory(run_dir))
    profile_fig = render_profiles(run_dir)
    if profile_fig is not None:
        written.append(profile_fig)
    return written


def render_scheme_gap(report: dict, out_path) -> Path:
    """Trend of the sup-difference between fidelity schemes over grid size."""
    out_path = Path(out_path)
    n_values = report["n_values"]
    finals = [report["final_sup_diff"][n] for n in n_values]
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.loglog(n_values, finals, "o-", lw=1.2)
    ax.set_xlabel("cells")
    ax.set_ylabel("sup difference at final stamp")
    ax.set_title("fidelity-scheme gap vs resolution")
    ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_extinction_table(report: dict, out_path) -> Path:
    """Bar chart of measured vs reference crossing steps per parameter row."""
    out_path = Path(out_path)
    rows = report["rows"]
    thresholds = report["thresholds"]
    fig, axes = plt.subplots(1, len(rows), figsize=(3.4 * len(rows), 3.6), squeeze=False)
    for k, row in enumerate(rows):
        ax = axes[0][k]
        xs = np.arange(len(thresholds))
        measured = [row["crossings"].get(t) or np.nan for t in thresholds]
        reference = [row["reference"].get(t) or np.nan for t in thresholds]
        ax.bar(xs - 0.18, measured, width=0.36, label="measured")
        ax.bar(xs + 0.18, reference, width=0.36, label="reference")
        ax.axhline(row["bound_steps"], color="k", ls=":", lw=1.0, label="bound")
        ax.set_xticks(xs, [f"{t:g}" for t in thresholds], fontsize=8)
        ax.set_yscale("log")
        ax.set_title(f"N={row['n']}, c_lambda={row['c_lambda']:g}", fontsize=9)
        if k == 0:
            ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path
