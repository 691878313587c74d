import numpy as np
import pytest
import sympy as sp

from weylhelp import mat2
from weylhelp.laurent import (Branch, LaurentBreakdownError, constant_term, denominator_coeffs,
                              laurent_from_coeffs, numerator_coeffs, residue_sensitivity)

lam = sp.Symbol("lam")
I2 = np.eye(2)


def psi_taylor(M, alpha, order=5):
    """Taylor coefficients of (alpha I + M^-1)^-1 for a symbolic 2x2 M(lam), by sympy."""
    Minv = sp.simplify(M.inv())
    psi = (alpha * sp.eye(2) + Minv).inv()
    out = []
    series = [[sp.series(sp.simplify(psi[i, j]), lam, 0, order).removeO() for j in range(2)]
              for i in range(2)]
    for nu in range(order):
        out.append(np.array([[complex(sp.expand(series[i][j]).coeff(lam, nu)) for j in range(2)]
                             for i in range(2)]))
    return out


def poly_oracle(psis, alpha):
    """Degree-4 truncation of 1 - alpha tr Psi + alpha^2 det Psi and Psi - alpha det Psi I."""
    n = len(psis)
    P = [sp.Matrix(p) for p in psis]
    psi = sum((P[k] * lam**k for k in range(n)), sp.zeros(2, 2))
    den = sp.expand(1 - alpha * psi.trace() + alpha**2 * psi.det())
    num = (psi - alpha * psi.det() * sp.eye(2)).applyfunc(sp.expand)
    a = [complex(den.coeff(lam, k)) for k in range(1, 5)]
    A = [np.array(num.applyfunc(lambda e: e.coeff(lam, k)), dtype=complex) for k in range(5)]
    return complex(den.coeff(lam, 0)), a, A


def test_scalar_pole_coefficients():
    psis = [(-1.0) ** nu * I2 for nu in range(5)]         # M = I / lam, alpha = 1
    a = denominator_coeffs(psis, 1.0)
    assert a[0] == 0 and a[1] == 1
    A = numerator_coeffs(psis, 1.0)
    assert np.allclose(A[0], 0) and np.allclose(A[1], I2)
    ls = laurent_from_coeffs(psis, 1.0, 1e-9)
    assert ls.branch is Branch.A1_ZERO
    assert np.allclose(ls.residue, I2, atol=1e-12)


def test_constant_psi_coefficients():
    psis = [np.array([[0.3, 0.1], [0.1, 0.2]])] + [np.zeros((2, 2))] * 4
    assert denominator_coeffs(psis, 1 + 1j) == [0, 0, 0, 0]


def test_inverse_alpha_gives_zero_leading_numerator():
    alpha = 1 + 1j
    A = numerator_coeffs([I2 / alpha, I2, I2, I2], alpha)
    assert np.allclose(A[0], 0, atol=1e-15)


@pytest.mark.parametrize("seed", range(3))
def test_coefficients_against_polynomial_oracle(seed):
    rng = np.random.default_rng(seed)
    alpha = 1 + 1j
    psis = []
    for _ in range(5):
        B = rng.integers(-5, 6, size=(2, 2)) / 4
        psis.append(B + B.T)
    a0, a, A = poly_oracle(psis, alpha)
    assert abs(constant_term(psis, alpha) - a0) <= 1e-12
    assert np.allclose(denominator_coeffs(psis, alpha), a, atol=1e-12)
    for got, want in zip(numerator_coeffs(psis, alpha), A):
        assert np.allclose(got, want, atol=1e-12)


@pytest.mark.parametrize("alpha", [1, 1 + 1j])
def test_rank_one_diagonal_case(alpha):
    c = sp.Rational(3, 7)
    M = sp.diag(1 / lam, c)
    psis = psi_taylor(M, alpha)
    ls = laurent_from_coeffs(psis, complex(alpha), 1e-9)
    assert ls.branch is Branch.A1_NONZERO
    assert np.max(np.abs(ls.residue - np.diag([1.0, 0.0]))) <= 1e-10
    assert np.max(np.abs(ls.M(0) - np.diag([0.0, 3 / 7]))) <= 1e-10


@pytest.mark.parametrize("alpha", [1, 1 + 1j])
def test_full_rank_scalar_case(alpha):
    psis = psi_taylor(sp.eye(2) / lam, alpha)
    ls = laurent_from_coeffs(psis, complex(alpha), 1e-9)
    assert ls.branch is Branch.A1_ZERO
    assert np.max(np.abs(ls.residue - I2)) <= 1e-10
    assert np.max(np.abs(ls.M(0))) <= 1e-10


# a generic symmetric pole: residue sigma, then M0, M1 (all real symmetric)
SIG1 = sp.Matrix([[-2, -1], [-1, sp.Rational(-1, 2)]])          # rank 1
SIG2 = sp.Matrix([[-3, 1], [1, -2]])                             # rank 2
M0 = sp.Matrix([[1, sp.Rational(1, 3)], [sp.Rational(1, 3), -2]])
M1 = sp.Matrix([[sp.Rational(1, 2), 0], [0, 1]])


@pytest.mark.parametrize("sigma,branch", [(SIG1, Branch.A1_NONZERO), (SIG2, Branch.A1_ZERO)])
def test_branches_reproduce_symbolic_expansion(sigma, branch):
    alpha = 1 + 1j
    M = sigma / lam + M0 + M1 * lam
    psis = psi_taylor(M, alpha)
    ls = laurent_from_coeffs(psis, alpha, 1e-9)
    assert ls.branch is branch
    assert np.max(np.abs(ls.residue - np.array(sigma, dtype=float))) <= 1e-10
    assert np.max(np.abs(ls.M(0) - np.array(M0, dtype=float))) <= 1e-10
    assert np.max(np.abs(ls.M(1) - np.array(M1, dtype=float))) <= 1e-9
    assert ls.realness_defect <= 1e-10


def test_paired_reconstruction():
    # M_D = -M_N^{-1}; both Laurent series multiply to -I up to the truncation order.
    # M_D has a pole too because M0 vanishes on the null vector of the residue.
    alpha = 1 + 1j
    MN = sp.diag(-2, 0) / lam + sp.Matrix([[1, sp.Rational(1, 3)], [sp.Rational(1, 3), 0]]) \
        + M1 * lam
    MD = sp.simplify(-MN.inv())
    pn, pd = psi_taylor(MN, alpha), psi_taylor(MD, alpha)
    assert abs(constant_term(pn, alpha)) < 1e-12 and abs(constant_term(pd, alpha)) < 1e-12
    ln = laurent_from_coeffs(pn, alpha, 1e-9)
    ld = laurent_from_coeffs(pd, alpha, 1e-9)
    # residues are orthogonal: sigma_D sigma_N = 0
    assert np.max(np.abs(ln.residue @ ld.residue)) <= 1e-10
    for z in (1e-2, 1e-3):
        prod = ln.evaluate(z) @ ld.evaluate(z)
        assert np.max(np.abs(prod + I2)) <= 50 * z


def test_breakdown_when_both_vanish():
    psis = [np.eye(2) * 0.3] + [np.zeros((2, 2))] * 4
    with pytest.raises(LaurentBreakdownError):
        laurent_from_coeffs(psis, 1.0, 1e-9)


def test_truncation_flag():
    psis = [(-1.0) ** nu * I2 for nu in range(4)]
    ls = laurent_from_coeffs(psis, 1.0, 1e-9)
    assert ls.truncated and len(ls.coeffs) == 2 and ls.M(1) is None
    psis.append(I2.copy())
    ls = laurent_from_coeffs(psis, 1.0, 1e-9)
    assert not ls.truncated and len(ls.coeffs) == 3
    with pytest.raises(ValueError):
        laurent_from_coeffs(psis[:3], 1.0, 1e-9)


def test_adjugate_identity_exact():
    for B in ([[3, 5], [7, 11]], [[0.5, -0.25], [2, 8]], [[1 + 2j, 3], [4j, -1]]):
        B = np.array(B, dtype=complex)
        assert np.array_equal(B @ mat2.adj(B), mat2.det(B) * I2)


def test_sensitivity_scales_with_errors():
    alpha = 1 + 1j
    psis = psi_taylor(SIG1 / lam + M0 + M1 * lam, alpha)
    small = residue_sensitivity(psis, [1e-12] * 5, alpha, Branch.A1_NONZERO)
    big = residue_sensitivity(psis, [1e-9] * 5, alpha, Branch.A1_NONZERO)
    assert 0 < small < big
    assert big / small == pytest.approx(1000, rel=0.05)
    assert residue_sensitivity(psis, [0.0] * 5, alpha, Branch.A1_NONZERO) == 0.0
