"""Unit tests for the shrinkage kernels and their optimality conditions."""

import math

import numpy as np
import pytest

from facetflow.shrinkage import (
    ShrinkParams,
    shrink_iso2d,
    shrink_spohn,
    shrink_spohn2d,
    shrink_tv,
)

from oracles import grid_prox_argmin, spohn_prox_objective, tv_prox_objective


# ---------------------------------------------------------------------------
# soft threshold
# ---------------------------------------------------------------------------

def test_shrink_tv_hand_values():
    assert shrink_tv(3.0, 1.0) == pytest.approx(2.0)
    assert shrink_tv(-3.0, 1.0) == pytest.approx(-2.0)
    assert shrink_tv(0.5, 1.0) == 0.0
    assert shrink_tv(0.0, 1.0) == 0.0


def test_shrink_tv_scalar_and_array_forms():
    out = shrink_tv(np.array([-2.0, -0.1, 0.0, 0.1, 2.0]), 0.5)
    np.testing.assert_allclose(out, [-1.5, 0.0, 0.0, 0.0, 1.5], atol=1e-15)
    assert isinstance(shrink_tv(1.0, 0.5), float)


def test_shrink_tv_rejects_bad_threshold():
    with pytest.raises(ValueError):
        shrink_tv(1.0, 0.0)
    with pytest.raises(ValueError):
        shrink_tv(1.0, -2.0)


def test_shrink_tv_never_changes_sign():
    rng = np.random.default_rng(11)
    rho = rng.uniform(-5.0, 5.0, size=500)
    out = shrink_tv(rho, 0.7)
    assert np.all(out * rho >= 0.0)
    assert np.all(np.abs(out) <= np.abs(rho))


# ---------------------------------------------------------------------------
# cubic shrinkage
# ---------------------------------------------------------------------------

def test_shrink_spohn_hand_value():
    # q = 2, so the root is 4 / (1 + sqrt(9)) = 1 exactly
    assert shrink_spohn(3.0, 1.0, 1.0) == pytest.approx(1.0, abs=1e-15)
    assert shrink_spohn(-3.0, 1.0, 1.0) == pytest.approx(-1.0, abs=1e-15)


def test_shrink_spohn_dead_zone():
    assert shrink_spohn(0.5, 1.0, 1.0) == 0.0
    assert shrink_spohn(1.0, 1.0, 1.0) == 0.0  # boundary of |rho| <= a beta
    assert shrink_spohn(0.0, 2.0, 0.3) == 0.0


def test_shrink_spohn_validates_parameters():
    with pytest.raises(ValueError):
        shrink_spohn(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        shrink_spohn(1.0, 1.0, 0.0)


def test_shrink_spohn_matches_literal_root_formula():
    rng = np.random.default_rng(23)
    for _ in range(200):
        a = float(10.0 ** rng.uniform(-1.3, 1.3))
        beta = float(10.0 ** rng.uniform(-1.0, 0.7))
        rho = float(rng.uniform(-5.0, 5.0))
        if abs(rho) <= a * beta:
            continue
        q = abs(rho) - a * beta
        literal = (rho / (2.0 * a * abs(rho))) * (-1.0 + math.sqrt(1.0 + 4.0 * a * q))
        assert shrink_spohn(rho, a, beta) == pytest.approx(literal, rel=1e-12)


def test_shrink_spohn_stationarity_residual():
    rng = np.random.default_rng(29)
    for _ in range(300):
        a = float(10.0 ** rng.uniform(-1.0, 1.0))
        beta = float(10.0 ** rng.uniform(-1.0, 0.5))
        rho = float(rng.uniform(-3.0, 3.0))
        x = shrink_spohn(rho, a, beta)
        if x == 0.0:
            assert abs(rho) <= a * beta + 1e-12
        else:
            residual = beta * math.copysign(1.0, x) + x * abs(x) + (x - rho) / a
            assert abs(residual) <= 1e-12


@pytest.mark.parametrize("kernel,extra", [("tv", ()), ("spohn", (0.8,))])
def test_shrinkage_matches_grid_search(kernel, extra):
    rng = np.random.default_rng(31)
    for _ in range(20):
        a = float(10.0 ** rng.uniform(-0.7, 0.7))
        rho = float(rng.uniform(-2.5, 2.5))
        if kernel == "tv":
            closed = shrink_tv(rho, a)
            brute = grid_prox_argmin(tv_prox_objective(rho, a), rho)
        else:
            closed = shrink_spohn(rho, a, *extra)
            brute = grid_prox_argmin(spohn_prox_objective(rho, a, *extra), rho)
        assert abs(closed - brute) <= 2e-5


def test_shrink_spohn_vectorized_matches_scalar():
    rng = np.random.default_rng(37)
    rho = rng.uniform(-4.0, 4.0, size=64)
    out = shrink_spohn(rho, 0.6, 0.9)
    scalar = np.array([shrink_spohn(float(r), 0.6, 0.9) for r in rho])
    np.testing.assert_array_equal(out, scalar)


# ---------------------------------------------------------------------------
# 2D isotropic kernel
# ---------------------------------------------------------------------------

def test_shrink_iso2d_hand_value():
    dx, dy = shrink_iso2d(3.0, 4.0, 1.0)
    assert dx == pytest.approx(2.4, abs=1e-14)
    assert dy == pytest.approx(3.2, abs=1e-14)


def test_shrink_iso2d_dead_zone_and_zero_vector():
    assert shrink_iso2d(0.3, 0.4, 1.0) == (0.0, 0.0)
    assert shrink_iso2d(0.0, 0.0, 2.0) == (0.0, 0.0)


def test_shrink_iso2d_preserves_direction():
    rng = np.random.default_rng(41)
    sx = rng.uniform(-3.0, 3.0, size=200)
    sy = rng.uniform(-3.0, 3.0, size=200)
    dx, dy = shrink_iso2d(sx, sy, 2.5)
    cross = dx * sy - dy * sx
    assert np.abs(cross).max() <= 1e-12
    assert np.all(dx * sx >= 0.0)
    assert np.all(dy * sy >= 0.0)


def test_shrink_iso2d_stationarity_residual():
    rng = np.random.default_rng(43)
    mu_cell = 3.0
    sx = rng.uniform(-3.0, 3.0, size=200)
    sy = rng.uniform(-3.0, 3.0, size=200)
    dx, dy = shrink_iso2d(sx, sy, mu_cell)
    mag = np.hypot(dx, dy)
    active = mag > 0.0
    rx = mu_cell * (dx - sx) + np.where(active, dx / np.where(active, mag, 1.0), 0.0)
    ry = mu_cell * (dy - sy) + np.where(active, dy / np.where(active, mag, 1.0), 0.0)
    assert np.abs(rx[active]).max() <= 1e-10
    assert np.abs(ry[active]).max() <= 1e-10
    # dead zone: the data vector fits inside the threshold ball
    assert np.all(np.hypot(sx, sy)[~active] <= 1.0 / mu_cell + 1e-12)


def test_shrink_iso2d_rejects_bad_weight():
    with pytest.raises(ValueError):
        shrink_iso2d(1.0, 1.0, 0.0)


# ---------------------------------------------------------------------------
# 2D cubic kernel
# ---------------------------------------------------------------------------

def test_shrink_spohn2d_hand_value():
    # c = 3/5, q = 3 - 0.6 = 2.4, ratio = 16: dx = 4.8 / (1 + sqrt(17))
    dx, dy = shrink_spohn2d(3.0, 4.0, 1.0, 1.0)
    assert dx == pytest.approx(4.8 / (1.0 + math.sqrt(17.0)), rel=1e-14)
    # y axis: c = 4/5, q = 4 - 0.8 = 3.2, ratio = 16: dy = 6.4 / (1 + sqrt(17))
    assert dy == pytest.approx(6.4 / (1.0 + math.sqrt(17.0)), rel=1e-14)


def test_shrink_spohn2d_zero_vector_and_dead_zone():
    assert shrink_spohn2d(0.0, 0.0, 1.0, 1.0) == (0.0, 0.0)
    # |sx| = beta * c / mu_cell exactly when s is tiny enough; tiny input dies
    dx, dy = shrink_spohn2d(1e-4, 1e-4, 1.0, 1.0)
    assert dx == 0.0 and dy == 0.0


def test_shrink_spohn2d_approximated_stationarity():
    rng = np.random.default_rng(47)
    worst = 0.0
    for _ in range(300):
        mu_cell = float(10.0 ** rng.uniform(-0.5, 1.0))
        beta = float(10.0 ** rng.uniform(-1.0, 0.5))
        sx = float(rng.uniform(-3.0, 3.0))
        sy = float(rng.uniform(-3.0, 3.0))
        s = math.hypot(sx, sy)
        if s == 0.0:
            continue
        dx, dy = shrink_spohn2d(sx, sy, mu_cell, beta)
        for sv, out in ((sx, dx), (sy, dy)):
            c = abs(sv) / s
            if out == 0.0:
                assert abs(sv) <= beta * c / mu_cell + 1e-12
            else:
                residual = (
                    beta * math.copysign(1.0, out) * c
                    + out * abs(out) / c
                    + mu_cell * (out - sv)
                )
                worst = max(worst, abs(residual))
    assert worst <= 1e-10


def test_shrink_spohn2d_vectorized_matches_scalar():
    rng = np.random.default_rng(53)
    sx = rng.uniform(-2.0, 2.0, size=40)
    sy = rng.uniform(-2.0, 2.0, size=40)
    dx, dy = shrink_spohn2d(sx, sy, 2.0, 0.4)
    for k in range(40):
        ex, ey = shrink_spohn2d(float(sx[k]), float(sy[k]), 2.0, 0.4)
        assert dx[k] == ex
        assert dy[k] == ey


def test_shrink_spohn2d_validates_parameters():
    with pytest.raises(ValueError):
        shrink_spohn2d(1.0, 1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        shrink_spohn2d(1.0, 1.0, 1.0, -1.0)


# ---------------------------------------------------------------------------
# parameter bundle
# ---------------------------------------------------------------------------

def test_shrink_params_cubic_exponent_is_pinned():
    with pytest.raises(ValueError):
        ShrinkParams(a=1.0, p=2)
    with pytest.raises(ValueError):
        ShrinkParams(a=1.0, p=4)
    assert ShrinkParams(a=1.0).p == 3


def test_shrink_params_validation():
    with pytest.raises(ValueError):
        ShrinkParams(a=0.0)
    with pytest.raises(ValueError):
        ShrinkParams(a=1.0, beta=-0.5)
    with pytest.raises(ValueError):
        ShrinkParams(a=1.0, mu_cell=0.0)


def test_shrink_params_flow_constructors():
    p1 = ShrinkParams.for_flow1d(mu=50.0, h=0.01, beta=0.3)
    assert p1.a == pytest.approx(1.0 / (50.0 * 0.01))
    assert p1.beta == 0.3
    p2 = ShrinkParams.for_flow2d(mu=100.0, hx=0.1, hy=0.05)
    assert p2.mu_cell == pytest.approx(0.5)
    assert p2.a == pytest.approx(2.0)
    with pytest.raises(ValueError):
        ShrinkParams.for_flow1d(mu=-1.0, h=0.01)
    with pytest.raises(ValueError):
        ShrinkParams.for_flow2d(mu=1.0, hx=0.0, hy=0.1)
