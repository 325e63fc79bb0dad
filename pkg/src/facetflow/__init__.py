"""Split Bregman solvers for fourth-order singular diffusion on periodic grids.

The package discretizes mean-free profiles on the unit torus (1D) or the unit
square torus (2D) by cell averages, removes the zero-mean redundancy through
an expansion/reduction pair, and evolves the profiles by implicit Euler steps
of H^-1-type gradient flows whose inner variational problems are solved with
alternating split Bregman sweeps.  Supported roughness energies: total
variation (fourth-order TV flow / dual-norm denoising) and the crystalline
surface-relaxation energy beta*|Du| + |Du|^3/3.
"""

from .operators1d import (
    Grid1D,
    OperatorSet1D,
    build_grid,
    build_operator_set,
    cell_centers,
    hminus1_norm,
    hminus1_norm_sq,
    spohn_energy,
    tv_energy,
)
from .shrinkage import ShrinkParams, shrink_iso2d, shrink_spohn, shrink_spohn2d, shrink_tv
from .solver1d import (
    BregmanState1D,
    SolverConfig1D,
    SystemFactor,
    factor_system,
    flow_step,
    init_state,
    run_flow,
    solve_osv,
    sweep,
)
from .trajectory import Trajectory
from .twodim import (
    Grid2D,
    OperatorSet2D,
    SolverConfig2D,
    build_grid2d,
    build_operator_set2d,
    run_flow2d,
)
from .presets import preset_initial
from .runner import RunConfig, compare_schemes, extinction_step_table, run

__version__ = "0.1.0"

__all__ = [
    "Grid1D",
    "OperatorSet1D",
    "build_grid",
    "build_operator_set",
    "cell_centers",
    "hminus1_norm",
    "hminus1_norm_sq",
    "spohn_energy",
    "tv_energy",
    "ShrinkParams",
    "shrink_tv",
    "shrink_spohn",
    "shrink_iso2d",
    "shrink_spohn2d",
    "SolverConfig1D",
    "BregmanState1D",
    "SystemFactor",
    "factor_system",
    "init_state",
    "sweep",
    "solve_osv",
    "flow_step",
    "run_flow",
    "Trajectory",
    "Grid2D",
    "OperatorSet2D",
    "SolverConfig2D",
    "build_grid2d",
    "build_operator_set2d",
    "run_flow2d",
    "preset_initial",
    "RunConfig",
    "run",
    "compare_schemes",
    "extinction_step_table",
    "__version__",
]
