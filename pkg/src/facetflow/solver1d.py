"""Alternating split Bregman sweeps for the reduced 1D problems.

One sweep performs, in order:

1. profile update -- solve the positive-definite system
   ``(lam h^3 K.T K + mu h grad.T grad) u = lam h^3 K.T K f + mu h grad.T (d - alpha)``
   through a cached Cholesky factorization,
2. jump update -- componentwise shrinkage of ``grad u + alpha`` (soft
   threshold for the TV model, cubic shrinkage for the crystalline model),
3. multiplier update -- ``alpha += grad u - d``.

Two driving modes share the sweep:

* "osv" (denoising): the data vector ``f`` is fixed and sweeps run until the
  profile is stationary, yielding the minimizer of
  ``E(u) + (lam h^3 / 2) ||K (u - f)||^2`` with E the model roughness energy.
* "flow": each sweep is one implicit Euler step of size ``tau = 1/lam`` of
  the H^-1-type gradient flow; the data is reset to the current profile at
  every step while jump variable and multiplier are carried across steps,
  which keeps per-step cost at one back-substitution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .operators1d import OperatorSet1D, SCHEMES, expand_reduced, hminus1_norm
from .shrinkage import shrink_spohn, shrink_tv
from .trajectory import STATUS_EXTINCT, STATUS_MAX_STEPS, Trajectory

MODELS = ("tv", "spohn")
MODES = ("osv", "flow")


@dataclass
class SolverConfig1D:
    """Parameters of one 1D solve.

    ``lam`` weighs the dual-norm fidelity (its inverse is the flow step
    size), ``mu`` the Bregman coupling.  ``model`` selects the roughness
    energy ("tv" or "spohn", the latter requiring ``beta``); ``scheme`` must
    match the operator set.  ``stop_supnorm = None`` disables the extinction
    stop and runs the flow for ``max_steps`` steps.
    """

    lam: float
    mu: float
    model: str = "tv"
    beta: float | None = None
    scheme: str = "approx-J"
    mode: str = "flow"
    osv_tol: float = 1e-10
    max_sweeps: int = 100_000
    stop_supnorm: float | None = 1e-4
    max_steps: int = 100_000

    def __post_init__(self):
        if self.lam <= 0.0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if self.mu <= 0.0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if self.model == "spohn":
            if self.beta is None or self.beta <= 0.0:
                raise ValueError("the spohn model requires beta > 0")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.osv_tol <= 0.0:
            raise ValueError("osv_tol must be positive")
        if self.max_sweeps < 1 or self.max_steps < 0:
            raise ValueError("iteration limits must be positive")

    @property
    def tau(self) -> float:
        """Implicit Euler step size of the flow interpretation."""
        return 1.0 / self.lam

    @classmethod
    def scaled(cls, grid, c_lambda: float = 1.0, c_mu: float = 5.0, **kwargs) -> "SolverConfig1D":
        """Config with the recommended grid scalings ``lam = c_lambda h^-3``, ``mu = c_mu h^-1``."""
        return cls(lam=c_lambda / grid.h**3, mu=c_mu / grid.h, **kwargs)


@dataclass
class BregmanState1D:
    """Iterate of the sweep: reduced profile, jump variable, multiplier."""

    u: np.ndarray
    d: np.ndarray
    alpha: np.ndarray
    sweep_index: int = 0


def init_state(u0: np.ndarray, ops: OperatorSet1D) -> BregmanState1D:
    """Fresh state: jump variable set to the actual jumps, multiplier zero."""
    u0 = np.asarray(u0, dtype=float)
    if u0.shape != (ops.grid.n - 1,):
        raise ValueError(f"expected reduced vector of length {ops.grid.n - 1}, got shape {u0.shape}")
    return BregmanState1D(u=u0.copy(), d=ops.grad @ u0, alpha=np.zeros(ops.grid.n))


@dataclass(frozen=True)
class SystemFactor:
    """Cached Cholesky factorization of the profile-update system."""

    chol: tuple
    fidelity_term: np.ndarray  # lam h^3 K.T K, reused in every right-hand side
    mu_h: float


def factor_system(ops: OperatorSet1D, cfg: SolverConfig1D) -> SystemFactor:
    """Assemble and factor ``lam h^3 K.T K + mu h grad.T grad`` (SPD by construction)."""
    if cfg.scheme != ops.scheme:
        raise ValueError(
            f"config scheme {cfg.scheme!r} does not match operator set scheme {ops.scheme!r}"
        )
    h = ops.grid.h
    fidelity_term = (cfg.lam * h**3) * (ops.fidelity.T @ ops.fidelity)
    system = fidelity_term + (cfg.mu * h) * (ops.grad.T @ ops.grad)
    system = 0.5 * (system + system.T)
    chol = cho_factor(system, lower=True)
    return SystemFactor(chol=chol, fidelity_term=fidelity_term, mu_h=cfg.mu * h)


def shrink_scale(ops: OperatorSet1D, cfg: SolverConfig1D) -> float:
    """Threshold scale of the jump update: ``1/(mu h)``."""
    return 1.0 / (cfg.mu * ops.grid.h)


def u_update(
    f: np.ndarray,
    d: np.ndarray,
    alpha: np.ndarray,
    factor: SystemFactor,
    ops: OperatorSet1D,
) -> np.ndarray:
    """Profile update: one Cholesky back-substitution."""
    rhs = factor.fidelity_term @ f + factor.mu_h * (ops.grad.T @ (d - alpha))
    return cho_solve(factor.chol, rhs)


def d_update(
    u_new: np.ndarray,
    alpha: np.ndarray,
    ops: OperatorSet1D,
    cfg: SolverConfig1D,
) -> np.ndarray:
    """Jump update: shrink ``grad u + alpha`` componentwise."""
    rho = ops.grad @ u_new + alpha
    a = shrink_scale(ops, cfg)
    if cfg.model == "tv":
        return shrink_tv(rho, a)
    return shrink_spohn(rho, a, cfg.beta)


def alpha_update(
    u_new: np.ndarray,
    d_new: np.ndarray,
    alpha: np.ndarray,
    ops: OperatorSet1D,
) -> np.ndarray:
    """Multiplier update: add the remaining constraint violation."""
    return alpha + ops.grad @ u_new - d_new


def sweep(
    state: BregmanState1D,
    f: np.ndarray,
    factor: SystemFactor,
    ops: OperatorSet1D,
    cfg: SolverConfig1D,
) -> BregmanState1D:
    """One full split Bregman sweep (profile, jump, multiplier in that order)."""
    u_new = u_update(f, state.d, state.alpha, factor, ops)
    rho = ops.grad @ u_new + state.alpha
    a = shrink_scale(ops, cfg)
    if cfg.model == "tv":
        d_new = shrink_tv(rho, a)
    else:
        d_new = shrink_spohn(rho, a, cfg.beta)
    # alpha + grad u - d collapses to rho - d
    alpha_new = rho - d_new
    return BregmanState1D(u=u_new, d=d_new, alpha=alpha_new, sweep_index=state.sweep_index + 1)


def roughness_energy(u: np.ndarray, ops: OperatorSet1D, cfg: SolverConfig1D) -> float:
    """Model roughness energy of the profile (TV or crystalline)."""
    jumps = np.abs(ops.grad @ np.asarray(u, dtype=float))
    if cfg.model == "tv":
        return float(jumps.sum())
    return float(cfg.beta * jumps.sum() + (jumps**3).sum() / 3.0)


def _jump_energy(d: np.ndarray, cfg: SolverConfig1D) -> float:
    ad = np.abs(d)
    if cfg.model == "tv":
        return float(ad.sum())
    return float(cfg.beta * ad.sum() + (ad**3).sum() / 3.0)


def objective(u: np.ndarray, f: np.ndarray, ops: OperatorSet1D, cfg: SolverConfig1D) -> float:
    """Constrained objective: roughness energy plus the dual-norm fidelity."""
    h = ops.grid.h
    kv = ops.fidelity @ (np.asarray(u, dtype=float) - np.asarray(f, dtype=float))
    return roughness_energy(u, ops, cfg) + 0.5 * cfg.lam * h**3 * float(kv @ kv)


def split_objective(
    u: np.ndarray,
    d: np.ndarray,
    f: np.ndarray,
    ops: OperatorSet1D,
    cfg: SolverConfig1D,
) -> float:
    """Relaxed objective with the quadratic coupling penalty in place of the constraint."""
    h = ops.grid.h
    kv = ops.fidelity @ (np.asarray(u, dtype=float) - np.asarray(f, dtype=float))
    gap = d - ops.grad @ np.asarray(u, dtype=float)
    return (
        _jump_energy(d, cfg)
        + 0.5 * cfg.lam * h**3 * float(kv @ kv)
        + 0.5 * cfg.mu * h * float(gap @ gap)
    )


@dataclass
class OSVResult:
    """Outcome of a stationary (denoising) solve."""

    u: np.ndarray
    state: BregmanState1D
    objectives: list = field(default_factory=list)
    sweeps: int = 0
    converged: bool = False
    final_change: float = float("nan")


def solve_osv(
    f: np.ndarray,
    ops: OperatorSet1D,
    cfg: SolverConfig1D,
    u0: np.ndarray | None = None,
    callback=None,
) -> OSVResult:
    """Run sweeps with fixed data until the profile is stationary.

    Stops when ``||u_new - u|| <= osv_tol * max(||u||, h)`` or after
    ``max_sweeps`` sweeps; non-convergence is reported through the result,
    not raised.  ``callback(k, state)``, if given, runs after every sweep.
    """
    if cfg.mode != "osv":
        raise ValueError(f"solve_osv requires mode 'osv', got {cfg.mode!r}")
    f = np.asarray(f, dtype=float)
    if u0 is None:
        u0 = np.zeros(ops.grid.n - 1)
    factor = factor_system(ops, cfg)
    state = init_state(u0, ops)
    if callback is not None:
        callback(0, state)
    objectives = [objective(state.u, f, ops, cfg)]
    converged = False
    change = float("nan")
    for _ in range(cfg.max_sweeps):
        prev_norm = float(np.linalg.norm(state.u))
        new = sweep(state, f, factor, ops, cfg)
        change = float(np.linalg.norm(new.u - state.u))
        state = new
        objectives.append(objective(state.u, f, ops, cfg))
        if callback is not None:
            callback(state.sweep_index, state)
        if change <= cfg.osv_tol * max(prev_norm, ops.grid.h):
            converged = True
            break
    return OSVResult(
        u=state.u,
        state=state,
        objectives=objectives,
        sweeps=state.sweep_index,
        converged=converged,
        final_change=change,
    )


def flow_step(
    state: BregmanState1D,
    factor: SystemFactor,
    ops: OperatorSet1D,
    cfg: SolverConfig1D,
) -> BregmanState1D:
    """One implicit Euler step: a single sweep with the data reset to the profile."""
    if cfg.mode != "flow":
        raise ValueError(f"flow_step requires mode 'flow', got {cfg.mode!r}")
    return sweep(state, state.u, factor, ops, cfg)


def _record(
    traj: Trajectory,
    step: int,
    state: BregmanState1D,
    sup: float,
    ops: OperatorSet1D,
) -> None:
    gu = ops.grad @ state.u
    gap = float(np.linalg.norm(state.d - gu))
    traj.append(step, sup, float(np.abs(gu).sum()), hminus1_norm(state.u, ops), gap)


def run_flow(
    u0: np.ndarray,
    ops: OperatorSet1D,
    cfg: SolverConfig1D,
    monitors=None,
    snapshot_every: int | None = None,
    record_every: int = 1,
    crossing_thresholds: tuple = (),
) -> Trajectory:
    """Drive the flow from ``u0`` until extinction or the step budget runs out.

    ``monitors`` is a callable or list of callables invoked as ``m(step,
    state)`` after every step (and once at step 0).  ``record_every`` thins
    the scalar records (sup-norm stopping and threshold crossings still see
    every step); the final step is always recorded.  ``crossing_thresholds``
    asks for the first step at which the sup-norm drops below each value,
    collected in ``trajectory.crossings``.
    """
    if cfg.mode != "flow":
        raise ValueError(f"run_flow requires mode 'flow', got {cfg.mode!r}")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    if monitors is None:
        monitors = []
    elif callable(monitors):
        monitors = [monitors]

    factor = factor_system(ops, cfg)
    state = init_state(u0, ops)
    traj = Trajectory(tau=cfg.tau)
    traj.crossings = {float(thr): None for thr in crossing_thresholds}

    def sup_of(st: BregmanState1D) -> float:
        return float(np.abs(expand_reduced(st.u)).max())

    def note_crossings(step: int, sup: float) -> None:
        for thr, hit in traj.crossings.items():
            if hit is None and sup < thr:
                traj.crossings[thr] = step

    def snapshot(step: int, st: BregmanState1D) -> None:
        if snapshot_every is not None and step % snapshot_every == 0:
            traj.snapshots[step] = expand_reduced(st.u)

    sup = sup_of(state)
    note_crossings(0, sup)
    _record(traj, 0, state, sup, ops)
    snapshot(0, state)
    for m in monitors:
        m(0, state)

    if cfg.stop_supnorm is not None and sup < cfg.stop_supnorm:
        traj.status = STATUS_EXTINCT
        traj.final_values = expand_reduced(state.u)
        return traj

    stopped = False
    while state.sweep_index < cfg.max_steps and not stopped:
        state = flow_step(state, factor, ops, cfg)
        step = state.sweep_index
        sup = sup_of(state)
        note_crossings(step, sup)
        stopped = cfg.stop_supnorm is not None and sup < cfg.stop_supnorm
        if stopped or step % record_every == 0 or step == cfg.max_steps:
            _record(traj, step, state, sup, ops)
        snapshot(step, state)
        for m in monitors:
            m(step, state)

    traj.status = STATUS_EXTINCT if stopped else STATUS_MAX_STEPS
    traj.final_values = expand_reduced(state.u)
    return traj
