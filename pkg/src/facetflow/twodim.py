"""Periodic 2D operators and split Bregman flows on the unit square torus.

Cell values are vectorized x-fastest: the cell ``(nx, ny)`` (1-based) maps to
flat index ``(ny - 1) * Nx + (nx - 1)``.  The axis difference operators are
Kronecker products of the 1D cyclic difference with identities,

    diff_x = kron(I_Ny, S_Nx),      diff_y = kron(S_Ny, I_Nx),

and the jump maps ``grad_x = diff_x @ expand`` / ``grad_y`` apply them to
reduced vectors (the expansion/reduction pair is the same construction as in
1D, one closing cell for the zero-mean constraint).  The reduced Laplacian
carries the mesh weights,

    lap = reduce @ (diff_x.T diff_x / hx^2 + diff_y.T diff_y / hy^2) @ expand,

and the dual-norm fidelity uses the axis matrices
``K_x = (grad_x / hx) @ lap^{-1}`` and ``K_y`` likewise, so that
``hx hy (||K_x v||^2 + ||K_y v||^2)`` is the squared averaged H^-1 norm.
Only the inverse-Laplacian ("approx-J") fidelity exists in 2D; the scheme
argument is kept for symmetry with 1D but anything else is rejected.

Three jump models share the sweep: "iso" (radially coupled soft threshold),
"aniso" (independent per-axis soft threshold), and "spohn" (per-axis cubic
shrinkage with frozen radial coefficients).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import cho_factor, cho_solve, lu_factor, lu_solve

from .operators1d import build_grid, difference_matrix
from .shrinkage import shrink_iso2d, shrink_spohn2d, shrink_tv
from .trajectory import STATUS_EXTINCT, STATUS_MAX_STEPS, Trajectory

MODELS_2D = ("iso", "aniso", "spohn")


@dataclass(frozen=True)
class Grid2D:
    """Uniform periodic partition of the unit square into ``nx * ny`` cells."""

    nx: int
    ny: int
    hx: float
    hy: float

    @property
    def size(self) -> int:
        return self.nx * self.ny


def build_grid2d(nx: int, ny: int) -> Grid2D:
    """Create a periodic 2D grid; both axis counts must be >= 3."""
    for label, n in (("nx", nx), ("ny", ny)):
        if not isinstance(n, (int, np.integer)):
            raise TypeError(f"{label} must be an integer, got {n!r}")
        if n < 3:
            raise ValueError(f"{label} must be >= 3, got {n}")
    return Grid2D(nx=int(nx), ny=int(ny), hx=1.0 / int(nx), hy=1.0 / int(ny))


def cell_centers2d(grid: Grid2D) -> tuple[np.ndarray, np.ndarray]:
    """Axis-wise cell centers ``x_i = i hx`` and ``y_j = j hy`` (1-based)."""
    x = grid.hx * np.arange(1, grid.nx + 1, dtype=float)
    y = grid.hy * np.arange(1, grid.ny + 1, dtype=float)
    return x, y


def expand_reduced2d(u: np.ndarray) -> np.ndarray:
    """Append the closing cell value ``-sum(u)``; same construction as in 1D."""
    u = np.asarray(u, dtype=float)
    return np.concatenate([u, [-u.sum()]])


def _drop_last_column(matrix: sp.spmatrix) -> sp.csr_matrix:
    """Apply the expansion from the right: ``X @ expand = X[:, :-1] - X[:, -1] * ones``."""
    m = matrix.shape[1]
    last = matrix[:, m - 1 :]
    ones_row = sp.csr_matrix(np.ones((1, m - 1)))
    return (matrix[:, : m - 1] - last @ ones_row).tocsr()


@dataclass(frozen=True)
class OperatorSet2D:
    """Dense/sparse operator bundle for one 2D grid (approx-J fidelity only)."""

    grid: Grid2D
    grad_x: sp.csr_matrix  # M x (M-1), jumps across x-interfaces of the expanded profile
    grad_y: sp.csr_matrix
    lap: np.ndarray  # (M-1) x (M-1) reduced Laplacian with mesh weights
    lap_lu: tuple
    fidelity_x: np.ndarray  # M x (M-1)
    fidelity_y: np.ndarray
    scheme: str

    def solve_lap(self, b: np.ndarray) -> np.ndarray:
        return lu_solve(self.lap_lu, np.asarray(b, dtype=float))


def build_operator_set2d(grid: Grid2D, scheme: str = "approx-J") -> OperatorSet2D:
    """Assemble the 2D operator bundle.

    Only the "approx-J" fidelity exists on 2D grids; requesting anything
    else raises.  Assembly cost is cubic in the cell count (dense LU plus
    dense back-substitutions), fine up to around 64 x 64.
    """
    if scheme != "approx-J":
        raise ValueError(
            f"2D grids support only the 'approx-J' fidelity scheme, got {scheme!r}"
        )
    sx = sp.csr_matrix(difference_matrix(build_grid(grid.nx)))
    sy = sp.csr_matrix(difference_matrix(build_grid(grid.ny)))
    diff_x = sp.kron(sp.eye(grid.ny), sx, format="csr")
    diff_y = sp.kron(sy, sp.eye(grid.nx), format="csr")
    grad_x = _drop_last_column(diff_x)
    grad_y = _drop_last_column(diff_y)
    lap_full = (diff_x.T @ diff_x) / grid.hx**2 + (diff_y.T @ diff_y) / grid.hy**2
    lap_tall = _drop_last_column(lap_full.tocsr()).toarray()
    # ones is a left null vector of lap_full, so reduction = dropping the last row
    lap = np.ascontiguousarray(lap_tall[:-1, :])
    lap_lu = lu_factor(lap)
    fidelity_x = lu_solve(lap_lu, (grad_x / grid.hx).T.toarray(), trans=1).T
    fidelity_y = lu_solve(lap_lu, (grad_y / grid.hy).T.toarray(), trans=1).T
    return OperatorSet2D(
        grid=grid,
        grad_x=grad_x,
        grad_y=grad_y,
        lap=lap,
        lap_lu=lap_lu,
        fidelity_x=np.ascontiguousarray(fidelity_x),
        fidelity_y=np.ascontiguousarray(fidelity_y),
        scheme="approx-J",
    )


def hminus1_norm_sq2d(v: np.ndarray, ops: OperatorSet2D) -> float:
    """Squared averaged dual-Sobolev norm ``hx hy (||K_x v||^2 + ||K_y v||^2)``."""
    v = np.asarray(v, dtype=float)
    kx = ops.fidelity_x @ v
    ky = ops.fidelity_y @ v
    return ops.grid.hx * ops.grid.hy * (float(kx @ kx) + float(ky @ ky))


def hminus1_norm2d(v: np.ndarray, ops: OperatorSet2D) -> float:
    return math.sqrt(hminus1_norm_sq2d(v, ops))


def iso_tv_energy(u: np.ndarray, ops: OperatorSet2D) -> float:
    """Isotropic total variation: sum of Euclidean jump magnitudes."""
    u = np.asarray(u, dtype=float)
    return float(np.hypot(ops.grad_x @ u, ops.grad_y @ u).sum())


def aniso_tv_energy(u: np.ndarray, ops: OperatorSet2D) -> float:
    """Anisotropic total variation: sum of absolute axis jumps."""
    u = np.asarray(u, dtype=float)
    return float(np.abs(ops.grad_x @ u).sum() + np.abs(ops.grad_y @ u).sum())


def spohn_energy2d(u: np.ndarray, beta: float, ops: OperatorSet2D) -> float:
    """Crystalline surface energy with radial jump magnitude."""
    if beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    u = np.asarray(u, dtype=float)
    mag = np.hypot(ops.grad_x @ u, ops.grad_y @ u)
    return float(beta * mag.sum() + (mag**3).sum() / 3.0)


@dataclass
class SolverConfig2D:
    """Parameters of one 2D flow (or stationary solve)."""

    lam: float
    mu: float
    model: str = "iso"
    beta: float | None = None
    mode: str = "flow"
    osv_tol: float = 1e-10
    max_sweeps: int = 100_000
    stop_supnorm: float | None = 1e-4
    max_steps: int = 200_000

    def __post_init__(self):
        if self.lam <= 0.0 or self.mu <= 0.0:
            raise ValueError("lam and mu must be positive")
        if self.model not in MODELS_2D:
            raise ValueError(f"unknown model {self.model!r}; expected one of {MODELS_2D}")
        if self.model == "spohn" and (self.beta is None or self.beta <= 0.0):
            raise ValueError("the spohn model requires beta > 0")
        if self.mode not in ("osv", "flow"):
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def tau(self) -> float:
        return 1.0 / self.lam

    @classmethod
    def scaled(cls, grid: Grid2D, c_lambda: float = 1.0, c_mu: float = 5.0, **kwargs) -> "SolverConfig2D":
        """Config with the recommended mesh scalings.

        Uses the cell measure: ``lam = c_lambda / (hx hy)^2`` and
        ``mu = c_mu / (hx hy)``, which on square grids reduce to
        ``c_lambda h^-4`` and ``c_mu h^-2``.
        """
        cell = grid.hx * grid.hy
        return cls(lam=c_lambda / cell**2, mu=c_mu / cell, **kwargs)


@dataclass
class BregmanState2D:
    """Iterate: reduced profile, per-axis jump variables and multipliers."""

    u: np.ndarray
    dx: np.ndarray
    dy: np.ndarray
    ax: np.ndarray
    ay: np.ndarray
    sweep_index: int = 0


def init_state2d(u0: np.ndarray, ops: OperatorSet2D) -> BregmanState2D:
    u0 = np.asarray(u0, dtype=float)
    m = ops.grid.size
    if u0.shape != (m - 1,):
        raise ValueError(f"expected reduced vector of length {m - 1}, got shape {u0.shape}")
    return BregmanState2D(
        u=u0.copy(),
        dx=ops.grad_x @ u0,
        dy=ops.grad_y @ u0,
        ax=np.zeros(m),
        ay=np.zeros(m),
    )


@dataclass(frozen=True)
class SystemFactor2D:
    chol: tuple
    fidelity_term: np.ndarray  # lam hx hy (K_x.T K_x + K_y.T K_y)
    mu_cell: float


def factor_system2d(ops: OperatorSet2D, cfg: SolverConfig2D) -> SystemFactor2D:
    """Assemble and factor the 2D profile-update system."""
    cell = ops.grid.hx * ops.grid.hy
    fidelity_term = (cfg.lam * cell) * (
        ops.fidelity_x.T @ ops.fidelity_x + ops.fidelity_y.T @ ops.fidelity_y
    )
    coupling = (ops.grad_x.T @ ops.grad_x + ops.grad_y.T @ ops.grad_y).toarray()
    system = fidelity_term + (cfg.mu * cell) * coupling
    system = 0.5 * (system + system.T)
    chol = cho_factor(system, lower=True)
    return SystemFactor2D(chol=chol, fidelity_term=fidelity_term, mu_cell=cfg.mu * cell)


def u_update2d(
    f: np.ndarray,
    dx: np.ndarray,
    dy: np.ndarray,
    ax: np.ndarray,
    ay: np.ndarray,
    factor: SystemFactor2D,
    ops: OperatorSet2D,
) -> np.ndarray:
    rhs = (
        factor.fidelity_term @ f
        + factor.mu_cell * (ops.grad_x.T @ (dx - ax) + ops.grad_y.T @ (dy - ay))
    )
    return cho_solve(factor.chol, rhs)


def d_update2d(
    u_new: np.ndarray,
    ax: np.ndarray,
    ay: np.ndarray,
    ops: OperatorSet2D,
    cfg: SolverConfig2D,
) -> tuple[np.ndarray, np.ndarray]:
    """Model-dependent jump update applied to ``(grad u + alpha)`` per axis."""
    sx = ops.grad_x @ u_new + ax
    sy = ops.grad_y @ u_new + ay
    mu_cell = cfg.mu * ops.grid.hx * ops.grid.hy
    if cfg.model == "iso":
        return shrink_iso2d(sx, sy, mu_cell)
    if cfg.model == "aniso":
        a = 1.0 / mu_cell
        return shrink_tv(sx, a), shrink_tv(sy, a)
    return shrink_spohn2d(sx, sy, mu_cell, cfg.beta)


def sweep2d(
    state: BregmanState2D,
    f: np.ndarray,
    factor: SystemFactor2D,
    ops: OperatorSet2D,
    cfg: SolverConfig2D,
) -> BregmanState2D:
    """One split Bregman sweep of the 2D system."""
    u_new = u_update2d(f, state.dx, state.dy, state.ax, state.ay, factor, ops)
    sx = ops.grad_x @ u_new + state.ax
    sy = ops.grad_y @ u_new + state.ay
    if cfg.model == "iso":
        dx_new, dy_new = shrink_iso2d(sx, sy, factor.mu_cell)
    elif cfg.model == "aniso":
        a = 1.0 / factor.mu_cell
        dx_new, dy_new = shrink_tv(sx, a), shrink_tv(sy, a)
    else:
        dx_new, dy_new = shrink_spohn2d(sx, sy, factor.mu_cell, cfg.beta)
    return BregmanState2D(
        u=u_new,
        dx=dx_new,
        dy=dy_new,
        ax=sx - dx_new,
        ay=sy - dy_new,
        sweep_index=state.sweep_index + 1,
    )


def flow_step2d(
    state: BregmanState2D,
    factor: SystemFactor2D,
    ops: OperatorSet2D,
    cfg: SolverConfig2D,
) -> BregmanState2D:
    """One implicit Euler step: a single sweep with the data reset to the profile."""
    if cfg.mode != "flow":
        raise ValueError(f"flow_step2d requires mode 'flow', got {cfg.mode!r}")
    return sweep2d(state, state.u, factor, ops, cfg)


def _model_tv_energy(u: np.ndarray, ops: OperatorSet2D, cfg: SolverConfig2D) -> float:
    if cfg.model == "aniso":
        return aniso_tv_energy(u, ops)
    return iso_tv_energy(u, ops)


def _record2d(traj: Trajectory, step: int, state: BregmanState2D, sup: float, ops, cfg) -> None:
    gx = ops.grad_x @ state.u
    gy = ops.grad_y @ state.u
    gap = math.sqrt(
        float(np.sum((state.dx - gx) ** 2)) + float(np.sum((state.dy - gy) ** 2))
    )
    traj.append(step, sup, _model_tv_energy(state.u, ops, cfg), hminus1_norm2d(state.u, ops), gap)


def run_flow2d(
    u0: np.ndarray,
    ops: OperatorSet2D,
    cfg: SolverConfig2D,
    monitors=None,
    snapshot_every: int | None = None,
    record_every: int = 1,
    crossing_thresholds: tuple = (),
) -> Trajectory:
    """Drive the 2D flow from ``u0``; mirrors the 1D driver feature for feature."""
    if cfg.mode != "flow":
        raise ValueError(f"run_flow2d requires mode 'flow', got {cfg.mode!r}")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    if monitors is None:
        monitors = []
    elif callable(monitors):
        monitors = [monitors]

    factor = factor_system2d(ops, cfg)
    state = init_state2d(u0, ops)
    traj = Trajectory(tau=cfg.tau)
    traj.crossings = {float(thr): None for thr in crossing_thresholds}

    def sup_of(st: BregmanState2D) -> float:
        return float(np.abs(expand_reduced2d(st.u)).max())

    def note_crossings(step: int, sup: float) -> None:
        for thr, hit in traj.crossings.items():
            if hit is None and sup < thr:
                traj.crossings[thr] = step

    def snapshot(step: int, st: BregmanState2D) -> None:
        if snapshot_every is not None and step % snapshot_every == 0:
            traj.snapshots[step] = expand_reduced2d(st.u)

    sup = sup_of(state)
    note_crossings(0, sup)
    _record2d(traj, 0, state, sup, ops, cfg)
    snapshot(0, state)
    for m in monitors:
        m(0, state)

    if cfg.stop_supnorm is not None and sup < cfg.stop_supnorm:
        traj.status = STATUS_EXTINCT
        traj.final_values = expand_reduced2d(state.u)
        return traj

    stopped = False
    while state.sweep_index < cfg.max_steps and not stopped:
        state = flow_step2d(state, factor, ops, cfg)
        step = state.sweep_index
        sup = sup_of(state)
        note_crossings(step, sup)
        stopped = cfg.stop_supnorm is not None and sup < cfg.stop_supnorm
        if stopped or step % record_every == 0 or step == cfg.max_steps:
            _record2d(traj, step, state, sup, ops, cfg)
        snapshot(step, state)
        for m in monitors:
            m(step, state)

    traj.status = STATUS_EXTINCT if stopped else STATUS_MAX_STEPS
    traj.final_values = expand_reduced2d(state.u)
    return traj
