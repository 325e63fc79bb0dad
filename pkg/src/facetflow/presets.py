"""Initial profiles for the bundled experiments.

Each preset is an explicit mean-free function on the torus, sampled at cell
centers; the sample mean is subtracted (it is only O(h^2) away from zero)
and the result is reduced by dropping the closing cell.  Custom initial data
can be loaded from a single-column text file or from a snapshot CSV written
by this package.
"""

from __future__ import annotations

import math

import numpy as np

from .operators1d import Grid1D, cell_centers, reduce_full
from .twodim import Grid2D, cell_centers2d

PRESETS_1D = ("cusp1d", "cubic1d", "cos1d")
PRESETS_2D = ("poly2d",)


def cusp_profile(x: np.ndarray) -> np.ndarray:
    """Capped spike: ``5/|x - 1/2|`` shifted to zero mean, constant on the middle tenth.

    The plateau value ``10 (4 - ln 5)`` continues the outer branch
    ``5/|x - 1/2| - 10 (1 + ln 5)`` continuously at ``|x - 1/2| = 1/10``.
    """
    x = np.asarray(x, dtype=float)
    out = np.full_like(x, 10.0 * (4.0 - math.log(5.0)))
    away = np.abs(x - 0.5) > 0.1
    out[away] = 5.0 / np.abs(x[away] - 0.5) - 10.0 * (1.0 + math.log(5.0))
    return out


def stepped_cubic_profile(x: np.ndarray) -> np.ndarray:
    """Continuous piecewise cubic with flat caps (a = 450, r = 1/15).

    Rises as ``a (x - 1/4)^3`` between the flat floor near the seam and the
    flat cap around ``x = 1/2``, falls as ``-a (x - 3/4)^3`` on the way back;
    even about ``x = 1/2``.
    """
    a, r = 450.0, 1.0 / 15.0
    x = np.asarray(x, dtype=float)
    cap = a * (0.25 - r) ** 3
    return np.select(
        [
            (x < r) | (x > 1.0 - r),
            x < 0.5 - r,
            x <= 0.5 + r,
        ],
        [
            -cap,
            a * (x - 0.25) ** 3,
            cap,
        ],
        default=-a * (x - 0.75) ** 3,
    )


def cosine_profile(x: np.ndarray) -> np.ndarray:
    """Single harmonic ``-cos(2 pi x)``."""
    return -np.cos(2.0 * np.pi * np.asarray(x, dtype=float))


def poly_profile(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Separable quartic bump ``x(x-1) y(y-1) - 1/36`` (mean free on the square)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return x * (x - 1.0) * y * (y - 1.0) - 1.0 / 36.0


_PRESET_FUNCS_1D = {
    "cusp1d": cusp_profile,
    "cubic1d": stepped_cubic_profile,
    "cos1d": cosine_profile,
}

_PRESET_FUNCS_2D = {
    "poly2d": poly_profile,
}


def sample_full_1d(name: str, grid: Grid1D) -> np.ndarray:
    """Full mean-free cell vector of a 1D preset (sample mean subtracted)."""
    values = _PRESET_FUNCS_1D[name](cell_centers(grid))
    return values - values.mean()


def sample_full_2d(name: str, grid: Grid2D) -> np.ndarray:
    """Flat (x-fastest) mean-free cell vector of a 2D preset."""
    x, y = cell_centers2d(grid)
    xm, ym = np.meshgrid(x, y)  # row j holds y_j, so C-order flattening is x-fastest
    values = _PRESET_FUNCS_2D[name](xm, ym).ravel()
    return values - values.mean()


def preset_initial(name: str, grid) -> np.ndarray:
    """Sample a named preset on ``grid`` and return the reduced vector."""
    if isinstance(grid, Grid2D):
        if name not in _PRESET_FUNCS_2D:
            raise ValueError(
                f"unknown 2D preset {name!r}; available: {', '.join(PRESETS_2D)}"
            )
        return sample_full_2d(name, grid)[:-1].copy()
    if name not in _PRESET_FUNCS_1D:
        raise ValueError(f"unknown 1D preset {name!r}; available: {', '.join(PRESETS_1D)}")
    return sample_full_1d(name, grid)[:-1].copy()


def load_initial(path, grid) -> np.ndarray:
    """Load custom initial cell values, mean-free and reduced.

    Accepts a bare column of numbers or a delimited file whose last column
    holds the values (snapshot CSVs with an ``x,u`` or ``x,y,u`` header work
    as-is).  The number of values must match the grid's cell count; 2D data
    must be ordered x-fastest.
    """
    expected = grid.size if isinstance(grid, Grid2D) else grid.n
    try:
        raw = np.genfromtxt(path, delimiter=",", names=None, skip_header=0)
        if raw.ndim == 0 or (raw.ndim >= 1 and np.isnan(np.asarray(raw, dtype=float)).any()):
            raw = np.genfromtxt(path, delimiter=",", skip_header=1)
    except (OSError, ValueError) as exc:
        raise ValueError(f"cannot parse initial data from {path}: {exc}") from exc
    raw = np.asarray(raw, dtype=float)
    if raw.ndim == 0:
        raise ValueError(f"initial data file {path} holds a single value, need {expected}")
    if raw.ndim == 2:
        raw = raw[:, -1]
    if np.isnan(raw).any():
        raise ValueError(f"initial data file {path} contains non-numeric entries")
    if raw.size != expected:
        raise ValueError(
            f"initial data file {path} holds {raw.size} values, grid needs {expected}"
        )
    return reduce_full(raw)
