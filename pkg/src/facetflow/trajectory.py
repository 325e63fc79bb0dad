"""Run diagnostics: per-step scalar records, field snapshots, CSV output.

A trajectory collects one scalar record per monitored step of a flow (or per
sweep of a stationary solve).  The CSV schema is fixed and shared by every
solver and dimension:

    step, t, sup_norm, tv_energy, hminus1_norm, constraint_gap

with ``t = step * tau`` (``tau = 1/lambda``), ``sup_norm`` the max-abs of the
expanded cell values, ``tv_energy`` the total-variation part of the model
energy, ``hminus1_norm`` the averaged dual-Sobolev norm under the scheme the
solver itself uses, and ``constraint_gap`` the Euclidean distance between the
jump variable and the actual jumps of the profile.  Floats are written with
17 significant digits so reruns are byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TRAJECTORY_COLUMNS = ("step", "t", "sup_norm", "tv_energy", "hminus1_norm", "constraint_gap")

#: Termination labels used by the flow drivers.
STATUS_RUNNING = "running"
STATUS_EXTINCT = "extinct"
STATUS_MAX_STEPS = "max-steps"
STATUS_CONVERGED = "converged"


def _fmt(x: float) -> str:
    return f"{x:.17g}"


@dataclass
class Trajectory:
    """Time-stamped scalar diagnostics plus optional full-profile snapshots."""

    tau: float
    steps: list = field(default_factory=list)
    times: list = field(default_factory=list)
    sup_norms: list = field(default_factory=list)
    tv_energies: list = field(default_factory=list)
    hminus1_norms: list = field(default_factory=list)
    constraint_gaps: list = field(default_factory=list)
    snapshots: dict = field(default_factory=dict)
    crossings: dict = field(default_factory=dict)
    status: str = STATUS_RUNNING
    final_values: np.ndarray | None = None

    def append(self, step: int, sup: float, tv: float, hm1: float, gap: float) -> None:
        if self.steps and step <= self.steps[-1]:
            raise ValueError(f"steps must increase strictly, got {step} after {self.steps[-1]}")
        self.steps.append(int(step))
        self.times.append(step * self.tau)
        self.sup_norms.append(float(sup))
        self.tv_energies.append(float(tv))
        self.hminus1_norms.append(float(hm1))
        self.constraint_gaps.append(float(gap))

    @property
    def last_step(self) -> int:
        return self.steps[-1] if self.steps else -1

    @property
    def final_sup(self) -> float:
        return self.sup_norms[-1]

    def rows(self):
        for i in range(len(self.steps)):
            yield (
                self.steps[i],
                self.times[i],
                self.sup_norms[i],
                self.tv_energies[i],
                self.hminus1_norms[i],
                self.constraint_gaps[i],
            )

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(",".join(TRAJECTORY_COLUMNS) + "\n")
            for step, t, sup, tv, hm1, gap in self.rows():
                fh.write(
                    f"{step},{_fmt(t)},{_fmt(sup)},{_fmt(tv)},{_fmt(hm1)},{_fmt(gap)}\n"
                )


def write_snapshot_1d(path, centers: np.ndarray, values: np.ndarray) -> None:
    """Write a 1D profile snapshot with columns ``x,u``."""
    if len(centers) != len(values):
        raise ValueError("centers and values must have equal length")
    with open(path, "w", newline="") as fh:
        fh.write("x,u\n")
        for x, u in zip(centers, values):
            fh.write(f"{_fmt(x)},{_fmt(u)}\n")


def write_snapshot_2d(path, x_centers: np.ndarray, y_centers: np.ndarray, values: np.ndarray) -> None:
    """Write a 2D snapshot with columns ``x,y,u``; rows iterate x fastest."""
    nx, ny = len(x_centers), len(y_centers)
    flat = np.asarray(values, dtype=float).reshape(-1)
    if flat.size != nx * ny:
        raise ValueError(f"expected {nx * ny} values, got {flat.size}")
    with open(path, "w", newline="") as fh:
        fh.write("x,y,u\n")
        for j in range(ny):
            for i in range(nx):
                fh.write(f"{_fmt(x_centers[i])},{_fmt(y_centers[j])},{_fmt(flat[j * nx + i])}\n")
