"""Shrinkage kernels: closed-form proximal maps for the jump variables.

Each kernel solves a small componentwise minimization that arises after the
jump variable is decoupled from the profile update:

* ``shrink_tv(rho, a)`` minimizes ``a |x| + (x - rho)^2 / 2`` scaled -- the
  classic soft threshold ``sign(rho) max(|rho| - a, 0)``.
* ``shrink_spohn(rho, a, beta)`` minimizes
  ``beta |x| + |x|^3 / 3 + (x - rho)^2 / (2 a)``; outside the dead zone
  ``|rho| <= a beta`` the minimizer is the root of a quadratic along
  ``sign(rho)``, written in a cancellation-free form.
* ``shrink_iso2d(sx, sy, mu_cell)`` shrinks the two-component vector
  radially (coupled L2 soft threshold).
* ``shrink_spohn2d(sx, sy, mu_cell, beta)`` applies the cubic shrinkage per
  axis with the radial coupling coefficients frozen at the input values.

All kernels accept scalars or same-shaped numpy arrays and treat a zero
input (where the direction is undefined) as zero output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _as_array(x):
    return np.asarray(x, dtype=float)


def _match_input(out: np.ndarray, scalar: bool):
    return float(out) if scalar else out


def shrink_tv(rho, a: float):
    """Soft threshold: shrink the magnitude by ``a``, never past zero.

    ``a`` must be positive; ``rho = 0`` maps to 0.
    """
    if a <= 0.0:
        raise ValueError(f"threshold must be positive, got {a}")
    rho = _as_array(rho)
    out = np.sign(rho) * np.maximum(np.abs(rho) - a, 0.0)
    return _match_input(out, rho.ndim == 0)


def shrink_spohn(rho, a: float, beta: float):
    """Cubic-augmented shrinkage for the crystalline surface energy.

    Solves ``beta sign(x) + x |x| + (x - rho)/a = 0`` along ``sign(rho)``
    when ``|rho| > a beta`` and returns 0 otherwise.  With
    ``q = max(|rho| - a beta, 0)`` the root is evaluated as

        ``sign(rho) * 2 q / (1 + sqrt(1 + 4 a q))``

    which is algebraically identical to the textbook quadratic-root form
    ``(rho / (2 a |rho|)) (-1 + sqrt(1 + 4 a q))`` but free of subtractive
    cancellation for small ``q``.
    """
    if a <= 0.0:
        raise ValueError(f"threshold scale must be positive, got {a}")
    if beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    rho = _as_array(rho)
    q = np.maximum(np.abs(rho) - a * beta, 0.0)
    out = np.sign(rho) * (2.0 * q) / (1.0 + np.sqrt(1.0 + 4.0 * a * q))
    return _match_input(out, rho.ndim == 0)


def shrink_iso2d(sx, sy, mu_cell: float):
    """Radial (coupled) soft threshold of the vector ``(sx, sy)``.

    Shrinks the Euclidean magnitude by ``1/mu_cell`` while keeping the
    direction; the zero vector stays at zero.  Returns the pair ``(dx, dy)``.
    """
    if mu_cell <= 0.0:
        raise ValueError(f"mu_cell must be positive, got {mu_cell}")
    sx = _as_array(sx)
    sy = _as_array(sy)
    scalar = sx.ndim == 0 and sy.ndim == 0
    sx, sy = np.broadcast_arrays(sx, sy)
    s = np.hypot(sx, sy)
    scale = np.zeros_like(s)
    np.divide(np.maximum(s - 1.0 / mu_cell, 0.0), s, out=scale, where=s > 0.0)
    return _match_input(sx * scale, scalar), _match_input(sy * scale, scalar)


def _spohn_axis(sv: np.ndarray, s: np.ndarray, mu_cell: float, beta: float) -> np.ndarray:
    # direction cosine |sv|/s of this axis; 0 whenever the whole vector vanishes
    cos = np.zeros_like(s)
    np.divide(np.abs(sv), s, out=cos, where=s > 0.0)
    q = np.maximum(np.abs(sv) - beta * cos / mu_cell, 0.0)
    active = q > 0.0
    ratio = np.zeros_like(s)
    np.divide(4.0 * q, mu_cell * cos, out=ratio, where=active)
    out = np.zeros_like(sv)
    np.divide(
        np.sign(sv) * 2.0 * q,
        1.0 + np.sqrt(1.0 + ratio),
        out=out,
        where=active,
    )
    return out


def shrink_spohn2d(sx, sy, mu_cell: float, beta: float):
    """Per-axis cubic shrinkage with radially frozen coefficients.

    With ``s = hypot(sx, sy)`` and ``c = |sx|/s``, the x component solves

        ``beta sign(dx) c + dx |dx| / c + mu_cell (dx - sx) = 0``

    (the cubic term weighted by the frozen direction), is zero inside the
    dead zone ``|sx| <= beta c / mu_cell``, and symmetrically in y.  The
    root is evaluated in the same cancellation-free form as the 1D kernel.
    Returns the pair ``(dx, dy)``.
    """
    if mu_cell <= 0.0:
        raise ValueError(f"mu_cell must be positive, got {mu_cell}")
    if beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    sx = _as_array(sx)
    sy = _as_array(sy)
    scalar = sx.ndim == 0 and sy.ndim == 0
    sx, sy = np.broadcast_arrays(sx, sy)
    s = np.hypot(sx, sy)
    dx = _spohn_axis(sx, s, mu_cell, beta)
    dy = _spohn_axis(sy, s, mu_cell, beta)
    return _match_input(dx, scalar), _match_input(dy, scalar)


@dataclass(frozen=True)
class ShrinkParams:
    """Validated bundle of shrinkage parameters.

    ``a`` is the 1D threshold scale ``1/(mu h)``; ``mu_cell`` the 2D cell
    weight ``mu hx hy``; ``beta`` the linear coefficient of the crystalline
    energy.  The cubic exponent is fixed: only ``p = 3`` is supported.
    """

    a: float
    beta: float | None = None
    mu_cell: float | None = None
    p: int = 3

    def __post_init__(self):
        if self.p != 3:
            raise ValueError(f"only the cubic exponent p=3 is supported, got p={self.p}")
        if self.a <= 0.0:
            raise ValueError(f"threshold scale must be positive, got {self.a}")
        if self.beta is not None and self.beta <= 0.0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.mu_cell is not None and self.mu_cell <= 0.0:
            raise ValueError(f"mu_cell must be positive, got {self.mu_cell}")

    @classmethod
    def for_flow1d(cls, mu: float, h: float, beta: float | None = None) -> "ShrinkParams":
        if mu <= 0.0 or h <= 0.0:
            raise ValueError("mu and h must be positive")
        return cls(a=1.0 / (mu * h), beta=beta)

    @classmethod
    def for_flow2d(cls, mu: float, hx: float, hy: float, beta: float | None = None) -> "ShrinkParams":
        if mu <= 0.0 or hx <= 0.0 or hy <= 0.0:
            raise ValueError("mu, hx and hy must be positive")
        mu_cell = mu * hx * hy
        return cls(a=1.0 / mu_cell, beta=beta, mu_cell=mu_cell)
