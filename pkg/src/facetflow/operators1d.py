"""Discrete periodic operators for the reduced fourth-order problems in 1D.

The unit interval is split into ``N`` cells of width ``h = 1/N`` with centers
``x_n = n h``; profiles are piecewise constant and mean free.  A mean-free
full vector of cell values lives in R^N but carries only N-1 degrees of
freedom, so the solvers work with the reduced vector of the first N-1 cells.
The operator set bundles the dense matrices that connect the two pictures:

``diff``
    N x N cyclic backward difference: row n holds +1 at n and -1 at n-1,
    wrapping at the seam.  Applied to cell values it returns the jumps
    across cell interfaces (scaled gradient times h).
``expand`` / ``reduce``
    N x (N-1) expansion whose last row closes the zero-mean constraint, and
    its (N-1) x N left inverse.
``grad``
    ``diff @ expand`` -- jumps of the expanded profile, the map that all
    shrinkage variables couple to.
``lap``
    (N-1) x (N-1) reduced graph Laplacian ``reduce @ diff.T @ diff @ expand``
    (h-free; the scaled inverse Laplacian is ``h^2 lap^{-1}``).  Kept together
    with its LU factorization; its determinant equals N^2.
``fidelity``
    The matrix K whose plain Euclidean norm realizes the averaged dual
    Sobolev (H^-1) fidelity: ``h^3 ||K v||_2^2``.  Two interchangeable
    schemes: "approx-J" uses the inverse-Laplacian gradient alone,
    ``K = grad @ lap^{-1}``; "exact-H" additionally applies the mass factor
    below, which makes the discrete norm exact for piecewise-constant data
    represented through quadratic splines.
``mass_factor``
    Cyclic lower-bidiagonal T with ``T.T @ T`` equal to the hat-function
    mass matrix (2/3 on the diagonal, 1/6 on the cyclic off-diagonals).

Everything is dense float64: grids of interest stay well below a thousand
cells, where clarity and LAPACK beat sparse bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

SCHEMES = ("approx-J", "exact-H")


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic partition of the unit interval into ``n`` cells."""

    n: int
    h: float


def build_grid(n: int) -> Grid1D:
    """Create a periodic 1D grid with ``n`` cells of width ``1/n``.

    ``n`` must be an integer >= 3 so that the reduced system is at least
    two-dimensional.
    """
    if not isinstance(n, (int, np.integer)):
        raise TypeError(f"cell count must be an integer, got {n!r}")
    if n < 3:
        raise ValueError(f"cell count must be >= 3, got {n}")
    n = int(n)
    return Grid1D(n=n, h=1.0 / n)


def cell_centers(grid: Grid1D) -> np.ndarray:
    """Cell centers ``x_n = n h`` for ``n = 1..N`` (the last one sits at 1 == 0)."""
    return grid.h * np.arange(1, grid.n + 1, dtype=float)


def expand_reduced(u: np.ndarray) -> np.ndarray:
    """Append the closing cell value ``-sum(u)``; the result is mean free."""
    u = np.asarray(u, dtype=float)
    return np.concatenate([u, [-u.sum()]])


def reduce_full(values: np.ndarray) -> np.ndarray:
    """Reduced coordinates of a full cell vector: drop the last cell, shift by the mean."""
    values = np.asarray(values, dtype=float)
    return values[:-1] - values.sum() / values.size


def difference_matrix(grid: Grid1D) -> np.ndarray:
    """Cyclic backward difference: ``(diff v)_n = v_n - v_{n-1}`` with wrap-around."""
    eye = np.eye(grid.n)
    return eye - np.roll(eye, -1, axis=1)


def expansion_matrix(grid: Grid1D) -> np.ndarray:
    """Reduced -> full cell values; the last row is all -1 (zero-mean closure)."""
    n = grid.n
    r = np.zeros((n, n - 1))
    r[: n - 1, :] = np.eye(n - 1)
    r[n - 1, :] = -1.0
    return r


def reduction_matrix(grid: Grid1D) -> np.ndarray:
    """Left inverse of the expansion: identity block minus the row-mean stencil."""
    n = grid.n
    l = np.full((n - 1, n), -1.0 / n)
    l[:, : n - 1] += np.eye(n - 1)
    return l


def mass_factor_matrix(grid: Grid1D) -> np.ndarray:
    """Cyclic lower-bidiagonal factor T of the hat-function mass matrix.

    Diagonal ``(sqrt(3)+1)/(2 sqrt(3))`` and cyclic subdiagonal
    ``(sqrt(3)-1)/(2 sqrt(3))`` satisfy a^2 + b^2 = 2/3 and a*b = 1/6, so
    ``T.T @ T`` reproduces the circulant with 2/3 on the diagonal and 1/6 on
    both cyclic off-diagonals.
    """
    s3 = math.sqrt(3.0)
    a = (s3 + 1.0) / (2.0 * s3)
    b = (s3 - 1.0) / (2.0 * s3)
    eye = np.eye(grid.n)
    return a * eye + b * np.roll(eye, -1, axis=1)


def mass_matrix(grid: Grid1D) -> np.ndarray:
    """Circulant hat-function mass matrix: 2/3 diagonal, 1/6 cyclic off-diagonals."""
    eye = np.eye(grid.n)
    off = np.roll(eye, -1, axis=1)
    return (2.0 / 3.0) * eye + (1.0 / 6.0) * (off + off.T)


def assemble_reduced_laplacian(diff: np.ndarray, expand: np.ndarray) -> np.ndarray:
    """Reduced Laplacian ``reduce @ diff.T @ diff @ expand`` (h-free).

    The ones vector is a left null vector of ``diff.T @ diff``, so the product
    ``diff.T @ diff @ expand`` has exactly vanishing column sums and applying
    the reduction matrix amounts to dropping the last row.  Doing it that way
    keeps small-N entries exact integers -- the 3x3 case comes out as exactly
    ``3 I``.
    """
    p = diff.T @ diff @ expand
    return p[:-1, :].copy()


def lu_det(lu_piv: tuple) -> float:
    """Determinant recovered from an LU factorization (product of pivots with sign)."""
    lu, piv = lu_piv
    sign = 1.0
    for i, p in enumerate(piv):
        if p != i:
            sign = -sign
    return sign * float(np.prod(np.diag(lu)))


def fidelity_matrix(
    grad: np.ndarray,
    lap_lu: tuple,
    scheme: str,
    mass_factor: np.ndarray | None = None,
) -> np.ndarray:
    """Materialize the dual-norm matrix K by back-substituting the Laplacian LU.

    "approx-J": ``K = grad @ lap^{-1}``; "exact-H": the same multiplied from
    the left by the mass factor.  The inverse is never formed: the transposed
    system ``lap.T Y = grad.T`` is solved column by column.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    k = lu_solve(lap_lu, grad.T, trans=1).T
    if scheme == "exact-H":
        if mass_factor is None:
            raise ValueError("exact-H scheme requires the mass factor")
        k = mass_factor @ k
    return np.ascontiguousarray(k)


@dataclass(frozen=True)
class OperatorSet1D:
    """All dense operators for one grid and one fidelity scheme."""

    grid: Grid1D
    diff: np.ndarray
    expand: np.ndarray
    reduce: np.ndarray
    grad: np.ndarray
    lap: np.ndarray
    lap_lu: tuple
    fidelity: np.ndarray
    mass_factor: np.ndarray
    scheme: str

    def solve_lap(self, b: np.ndarray) -> np.ndarray:
        """Solve ``lap x = b`` through the cached LU factorization."""
        return lu_solve(self.lap_lu, np.asarray(b, dtype=float))


def build_operator_set(grid: Grid1D, scheme: str = "approx-J") -> OperatorSet1D:
    """Assemble every operator for ``grid`` under the requested fidelity scheme."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    diff = difference_matrix(grid)
    expand = expansion_matrix(grid)
    reduce_ = reduction_matrix(grid)
    grad = diff @ expand
    lap = assemble_reduced_laplacian(diff, expand)
    lap_lu = lu_factor(lap)
    mass_factor = mass_factor_matrix(grid)
    fidelity = fidelity_matrix(grad, lap_lu, scheme, mass_factor)
    return OperatorSet1D(
        grid=grid,
        diff=diff,
        expand=expand,
        reduce=reduce_,
        grad=grad,
        lap=lap,
        lap_lu=lap_lu,
        fidelity=fidelity,
        mass_factor=mass_factor,
        scheme=scheme,
    )


def exact_norm_matrix(ops: OperatorSet1D) -> np.ndarray:
    """The exact-H dual-norm matrix, regardless of which scheme ``ops`` carries."""
    if ops.scheme == "exact-H":
        return ops.fidelity
    return ops.mass_factor @ ops.fidelity


def hminus1_norm_sq(v: np.ndarray, ops: OperatorSet1D) -> float:
    """Squared averaged dual-Sobolev norm ``h^3 ||K v||_2^2`` of a reduced vector."""
    kv = ops.fidelity @ np.asarray(v, dtype=float)
    return ops.grid.h**3 * float(kv @ kv)


def hminus1_norm(v: np.ndarray, ops: OperatorSet1D) -> float:
    """Averaged dual-Sobolev norm of a reduced vector."""
    return math.sqrt(hminus1_norm_sq(v, ops))


def tv_energy(u: np.ndarray, ops: OperatorSet1D) -> float:
    """Total variation of the expanded profile: L1 norm of the interface jumps."""
    return float(np.abs(ops.grad @ np.asarray(u, dtype=float)).sum())


def spohn_energy(u: np.ndarray, beta: float, ops: OperatorSet1D) -> float:
    """Crystalline surface energy ``beta ||jumps||_1 + (1/3) ||jumps||_3^3``."""
    if beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    jumps = np.abs(ops.grad @ np.asarray(u, dtype=float))
    return float(beta * jumps.sum() + (jumps**3).sum() / 3.0)
