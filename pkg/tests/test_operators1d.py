"""Unit tests for the 1D periodic operator toolkit."""

import math

import numpy as np
import pytest

from facetflow.operators1d import (
    Grid1D,
    build_grid,
    build_operator_set,
    cell_centers,
    difference_matrix,
    expand_reduced,
    expansion_matrix,
    exact_norm_matrix,
    fidelity_matrix,
    hminus1_norm,
    hminus1_norm_sq,
    lu_det,
    mass_factor_matrix,
    mass_matrix,
    assemble_reduced_laplacian,
    reduce_full,
    reduction_matrix,
    spohn_energy,
    tv_energy,
)

from oracles import (
    loop_difference,
    loop_expansion,
    loop_mass,
    loop_mass_factor,
    loop_reduction,
    reference_fidelity,
    reference_reduced_laplacian,
)


# ---------------------------------------------------------------------------
# grids and coordinate plumbing
# ---------------------------------------------------------------------------

def test_build_grid_basic():
    grid = build_grid(10)
    assert grid == Grid1D(n=10, h=0.1)
    assert cell_centers(grid)[0] == pytest.approx(0.1)
    assert cell_centers(grid)[-1] == pytest.approx(1.0)


def test_build_grid_rejects_bad_input():
    with pytest.raises(TypeError):
        build_grid(10.5)
    with pytest.raises(ValueError):
        build_grid(2)


def test_expand_reduce_roundtrip():
    rng = np.random.default_rng(0)
    u = rng.standard_normal(9)
    full = expand_reduced(u)
    assert full.shape == (10,)
    assert abs(full.sum()) < 1e-12
    np.testing.assert_allclose(reduce_full(full), u, atol=1e-14)


def test_reduce_full_recenters():
    # adding a constant to the full vector must not change the reduced one
    v = np.array([1.0, 2.0, 3.0, -6.0])
    np.testing.assert_allclose(reduce_full(v + 5.0), reduce_full(v), atol=1e-14)


# ---------------------------------------------------------------------------
# matrix builders against the loop references
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n", [3, 4, 7, 12])
def test_matrices_match_loop_construction(n):
    g = build_grid(n)
    np.testing.assert_array_equal(difference_matrix(g), loop_difference(n))
    np.testing.assert_array_equal(expansion_matrix(g), loop_expansion(n))
    np.testing.assert_allclose(reduction_matrix(g), loop_reduction(n), atol=1e-15)
    np.testing.assert_allclose(mass_factor_matrix(g), loop_mass_factor(n), atol=1e-15)
    np.testing.assert_allclose(mass_matrix(g), loop_mass(n), atol=1e-15)


@pytest.mark.parametrize("n", list(range(3, 33)))
def test_reduction_is_left_inverse_of_expansion(n):
    g = build_grid(n)
    prod = reduction_matrix(g) @ expansion_matrix(g)
    assert np.abs(prod - np.eye(n - 1)).max() <= 1e-13


@pytest.mark.parametrize("n", list(range(3, 33)))
def test_mass_factor_squares_to_mass_matrix(n):
    g = build_grid(n)
    t = mass_factor_matrix(g)
    assert np.abs(t.T @ t - mass_matrix(g)).max() <= 1e-12


@pytest.mark.parametrize("n", [3, 5, 8, 16, 32])
def test_reduced_laplacian_matches_triple_product(n):
    g = build_grid(n)
    lap = assemble_reduced_laplacian(difference_matrix(g), expansion_matrix(g))
    np.testing.assert_allclose(lap, reference_reduced_laplacian(n), atol=1e-12)


def test_reduced_laplacian_small_case_is_exact():
    g = build_grid(3)
    lap = assemble_reduced_laplacian(difference_matrix(g), expansion_matrix(g))
    np.testing.assert_array_equal(lap, 3.0 * np.eye(2))


@pytest.mark.parametrize("n", list(range(3, 33)))
def test_reduced_laplacian_determinant(n):
    g = build_grid(n)
    lap = assemble_reduced_laplacian(difference_matrix(g), expansion_matrix(g))
    det = np.linalg.det(lap)
    assert abs(det - n**2) <= 1e-9 * n**2


def test_lu_det_matches_dense_determinant():
    g = build_grid(17)
    ops = build_operator_set(g)
    det = np.linalg.det(
        assemble_reduced_laplacian(difference_matrix(g), expansion_matrix(g))
    )
    assert lu_det(ops.lap_lu) == pytest.approx(det, rel=1e-12)
    assert lu_det(ops.lap_lu) == pytest.approx(17.0**2, rel=1e-11)


# ---------------------------------------------------------------------------
# fidelity factors
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("scheme", ["approx-J", "exact-H"])
@pytest.mark.parametrize("n", [3, 6, 11, 20])
def test_fidelity_matrix_matches_dense_inverse(n, scheme):
    ops = build_operator_set(build_grid(n), scheme)
    np.testing.assert_allclose(ops.fidelity, reference_fidelity(n, scheme), atol=1e-10)


def test_fidelity_small_case_closed_form():
    # the 3-cell reduced operator is 3I, so the factor is the jump map over 3
    ops = build_operator_set(build_grid(3))
    np.testing.assert_allclose(ops.fidelity, ops.grad / 3.0, atol=1e-14)


def test_build_operator_set_rejects_unknown_scheme():
    with pytest.raises(ValueError):
        build_operator_set(build_grid(8), "spectral")


def test_fidelity_matrix_function_checks_scheme():
    ops = build_operator_set(build_grid(8))
    with pytest.raises(ValueError):
        fidelity_matrix(ops.grad, ops.lap_lu, "nope")


def test_solve_lap_roundtrip():
    ops = build_operator_set(build_grid(13))
    rng = np.random.default_rng(3)
    b = rng.standard_normal(12)
    x = ops.solve_lap(b)
    np.testing.assert_allclose(ops.lap @ x, b, atol=1e-11)


# ---------------------------------------------------------------------------
# norms and energies
# ---------------------------------------------------------------------------

def test_hminus1_norm_definition():
    ops = build_operator_set(build_grid(9))
    rng = np.random.default_rng(5)
    v = rng.standard_normal(8)
    kv = ops.fidelity @ v
    expected = ops.grid.h**3 * float(kv @ kv)
    assert hminus1_norm_sq(v, ops) == pytest.approx(expected, rel=1e-14)
    assert hminus1_norm(v, ops) == pytest.approx(math.sqrt(expected), rel=1e-14)


def test_exact_norm_matrix_adds_mass_factor_only_for_approx():
    g = build_grid(12)
    ops_j = build_operator_set(g, "approx-J")
    ops_h = build_operator_set(g, "exact-H")
    np.testing.assert_allclose(
        exact_norm_matrix(ops_j), mass_factor_matrix(g) @ ops_j.fidelity, atol=1e-13
    )
    np.testing.assert_allclose(exact_norm_matrix(ops_h), ops_h.fidelity, atol=1e-15)


def test_cosine_norm_value_exact_scheme():
    # zero-mean cosine of one period: dual norm 1/(2 sqrt(2) pi) in the limit
    grid = build_grid(200)
    ops = build_operator_set(grid, "exact-H")
    v = reduce_full(-np.cos(2.0 * math.pi * cell_centers(grid)))
    target = 1.0 / (2.0 * math.sqrt(2.0) * math.pi)
    assert abs(hminus1_norm(v, ops) - target) <= 5e-3 * target


def test_tv_energy_hand_value():
    # full profile (1, 1, -2): cyclic jumps 0, 3, -3 -> total variation 6
    ops = build_operator_set(build_grid(3))
    u = reduce_full(np.array([1.0, 1.0, -2.0]))
    assert tv_energy(u, ops) == pytest.approx(6.0, abs=1e-13)


def test_spohn_energy_hand_value():
    # same jumps, beta = 1: 1*6 + (27 + 27)/3 = 24
    ops = build_operator_set(build_grid(3))
    u = reduce_full(np.array([1.0, 1.0, -2.0]))
    assert spohn_energy(u, 1.0, ops) == pytest.approx(24.0, abs=1e-12)


def test_spohn_energy_requires_positive_beta():
    ops = build_operator_set(build_grid(3))
    with pytest.raises(ValueError):
        spohn_energy(np.zeros(2), 0.0, ops)


def test_constant_profile_has_zero_energies():
    ops = build_operator_set(build_grid(16))
    u = np.zeros(15)  # reduced coordinates of the zero profile
    assert tv_energy(u, ops) == 0.0
    assert hminus1_norm(u, ops) == 0.0
