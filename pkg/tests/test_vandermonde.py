import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weylhelp.vandermonde import (MAX_DEGREE, DualVandermondeSystem, VandermondeError,
                                  bp_dual_solve, geometric_nodes, solve_dual)

EPS = 2.0**-52


def test_nodes():
    assert np.array_equal(geometric_nodes(3), [0.125, 0.25, 0.5, 1.0])


def test_constant_data():
    a = solve_dual(np.full(5, 2.5 - 1j))
    assert np.allclose(a, [2.5 - 1j, 0, 0, 0, 0], atol=1e-14)


def test_two_point_by_hand():
    g0, g1 = 3.0, 7.0
    a = solve_dual([g0, g1])
    assert np.allclose(a, [2 * g0 - g1, 2 * (g1 - g0)], atol=1e-15)


def test_random_complex_against_dense_solve():
    rng = np.random.default_rng(11)
    m = 4
    x = geometric_nodes(m)
    a_true = rng.normal(size=m + 1) + 1j * rng.normal(size=m + 1)
    V = np.vander(x, m + 1, increasing=True)       # V[j, k] = x_j**k
    g = V @ a_true
    a = solve_dual(g)
    dense = np.linalg.solve(V, g)
    assert np.max(np.abs(a - a_true)) <= 1e-10 * np.max(np.abs(a_true))
    assert np.max(np.abs(a - dense)) <= 1e-12 * np.max(np.abs(dense)) * 10**(m / 2)


@pytest.mark.parametrize("m", range(0, 9))
def test_exact_on_monomials(m):
    x = geometric_nodes(m)
    for d in range(m + 1):
        a = solve_dual(x**d)
        unit = np.zeros(m + 1)
        unit[d] = 1
        assert np.max(np.abs(a - unit)) <= 1e-11


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**31))
def test_residual_bound(m, seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=m + 1) + 1j * rng.normal(size=m + 1)
    a = solve_dual(g)
    V = np.vander(geometric_nodes(m), m + 1, increasing=True)
    residual = np.max(np.abs(V @ a - g))
    assert residual <= 10 * m * 2.0 ** (m * m) * EPS * np.max(np.abs(g))


def test_matrix_valued_rhs_columnwise():
    rng = np.random.default_rng(5)
    g = rng.normal(size=(4, 2, 2))
    a = solve_dual(g)
    for i in range(2):
        for j in range(2):
            assert np.allclose(a[:, i, j], solve_dual(g[:, i, j]))


def test_validation():
    with pytest.raises(VandermondeError):
        DualVandermondeSystem(MAX_DEGREE + 1, np.zeros(MAX_DEGREE + 2))
    with pytest.raises(VandermondeError):
        DualVandermondeSystem(2, np.zeros(3), nodes=[0.5, 0.5, 1.0])
    with pytest.raises(VandermondeError):
        DualVandermondeSystem(2, np.zeros(3), nodes=[1.0, 0.5, 0.25])
    with pytest.raises(VandermondeError):
        DualVandermondeSystem(2, np.zeros(4))
    assert bp_dual_solve(DualVandermondeSystem(1, [1.0, 1.0], nodes=[1.0, 3.0]))[1] == 0
