"""Laurent coefficients of M about a simple pole from the Taylor coefficients of Psi.

With ``M = (Psi - alpha det(Psi) I) / (1 - alpha tr(Psi) + alpha^2 det(Psi))``
the denominator is ``a1 lam + a2 lam^2 + ...`` and the numerator
``A0 + A1 lam + ...``; dividing the two series gives the expansion of M.
When the residue has full rank, ``a1 = 0`` and ``A0 = 0`` and the division
starts one order later.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import mat2

__all__ = ["Branch", "LaurentSeries", "LaurentBreakdownError", "denominator_coeffs",
           "numerator_coeffs", "constant_term", "laurent_from_coeffs", "laurent_from_taylor",
           "residue_sensitivity"]


class Branch(enum.Enum):
    A1_NONZERO = "A1nonzero"
    A1_ZERO = "A1zero"


class LaurentBreakdownError(ArithmeticError):
    pass


@dataclass
class LaurentSeries:
    lam0: complex
    branch: Branch
    coeffs: list[np.ndarray]             # M_{-1}, M_0, M_1, ...
    a_coeffs: list[complex]              # a1..a4 (as many as available)
    A_coeffs: list[np.ndarray]           # A0..A4
    truncated: bool = False              # fewer M_k than the branch formula provides

    @property
    def residue(self) -> np.ndarray:
        return self.coeffs[0]

    @property
    def M_minus1(self) -> np.ndarray:
        return self.coeffs[0]

    def M(self, k: int) -> np.ndarray | None:
        i = k + 1
        return self.coeffs[i] if i < len(self.coeffs) else None

    @property
    def realness_defect(self) -> float:
        return max(float(np.max(np.abs(c.imag))) for c in self.coeffs)

    def evaluate(self, lam: complex) -> np.ndarray:
        return sum(c * lam ** (k - 1) for k, c in enumerate(self.coeffs))


def _psi_list(psis) -> list[np.ndarray]:
    return [np.asarray(p, dtype=complex) for p in psis]


def _det_coeffs(P: list[np.ndarray]) -> list[complex]:
    """Coefficients 0..len(P)-1 of det(sum P_nu lam^nu), truncated to degree 4."""
    n = min(len(P), 5)
    out = []
    for d in range(n):
        c = 0j
        for i in range(d + 1):
            j = d - i
            if i < j:
                c += mat2.tr_adj_prod(P[i], P[j])
            elif i == j:
                c += mat2.det(P[i])
        out.append(complex(c))
    return out


def constant_term(psis, alpha: complex) -> complex:
    """``1 - alpha tr(Psi_0) + alpha^2 det(Psi_0)``: zero exactly when M has a pole."""
    P0 = np.asarray(psis[0], dtype=complex)
    return complex(1 - alpha * mat2.trace(P0) + alpha**2 * mat2.det(P0))


def denominator_coeffs(psis, alpha: complex) -> list[complex]:
    """``a1..a4`` of ``1 - alpha tr(Psi) + alpha^2 det(Psi) = a1 lam + a2 lam^2 + ...``."""
    P = _psi_list(psis)
    if len(P) < 3:
        raise ValueError("need at least Psi_0..Psi_2")
    dets = _det_coeffs(P)
    return [complex(alpha**2 * dets[nu] - alpha * mat2.trace(P[nu]))
            for nu in range(1, min(len(P), 5))]


def numerator_coeffs(psis, alpha: complex) -> list[np.ndarray]:
    """``A0..A4`` of ``Psi - alpha det(Psi) I = A0 + A1 lam + ...``."""
    P = _psi_list(psis)
    dets = _det_coeffs(P)
    return [P[nu] - alpha * dets[nu] * mat2.I2 for nu in range(min(len(P), 5))]


def laurent_from_coeffs(psis, alpha: complex, tol: float, lam0: complex = 0,
                        branch: Branch | None = None) -> LaurentSeries:
    """Laurent series of M from Psi_0, Psi_1, ...; the branch follows ``|a1| > tol`` unless forced."""
    P = _psi_list(psis)
    if len(P) < 4:
        raise ValueError("need at least Psi_0..Psi_3")
    a = denominator_coeffs(P, alpha)
    A = numerator_coeffs(P, alpha)
    if branch is None:
        branch = Branch.A1_NONZERO if abs(a[0]) > tol else Branch.A1_ZERO
    if branch is Branch.A1_NONZERO:
        coeffs = _divide_a1(a, A)
        full = 4
    else:
        if abs(a[1]) <= tol:
            raise LaurentBreakdownError(
                "both a1 and a2 vanish to within the tolerance, which cannot happen for a simple "
                "pole of a 2x2 M-matrix; recompute Psi with a smaller integration tolerance")
        coeffs = _divide_a2(a, A)
        full = 3
    return LaurentSeries(complex(lam0), branch, coeffs, a, A, truncated=len(coeffs) < full)


def residue_sensitivity(psis, errors, alpha: complex, branch: Branch, order: int = 0) -> float:
    """First-order bound on the sup-norm error of ``M_{order-1}`` from per-coefficient errors.

    Each entry of each Psi_nu is perturbed in turn (real and imaginary parts)
    by its error estimate and the resulting changes are summed.
    """
    P = _psi_list(psis)
    base = laurent_from_coeffs(P, alpha, 0.0, branch=branch).coeffs[order]
    total = 0.0
    for nu, err in enumerate(errors[:len(P)]):
        if not err:
            continue
        for i in range(2):
            for j in range(2):
                for unit in (1.0, 1j):
                    Q = [p.copy() for p in P]
                    h = err * unit
                    Q[nu][i, j] += h
                    try:
                        pert = laurent_from_coeffs(Q, alpha, 0.0, branch=branch).coeffs[order]
                    except (LaurentBreakdownError, IndexError, ZeroDivisionError):
                        continue
                    total += float(np.max(np.abs(pert - base)))
    return total


def _divide_a1(a, A) -> list[np.ndarray]:
    a1 = a[0]
    a2 = a[1]
    out = [A[0] / a1, A[1] / a1 - (a2 / a1**2) * A[0]]
    if len(a) >= 3 and len(A) >= 3:
        a3 = a[2]
        c = a2**2 / a1**3 - a3 / a1**2
        out.append(A[2] / a1 - (a2 / a1**2) * A[1] + c * A[0])
        if len(a) >= 4 and len(A) >= 4:
            a4 = a[3]
            d = (2 * a1 * a3 - a2**2) * a2 / a1**4 - a4 / a1**2
            out.append(A[3] / a1 - (a2 / a1**2) * A[2] + c * A[1] + d * A[0])
    return out


def _divide_a2(a, A) -> list[np.ndarray]:
    a2 = a[1]
    out = [A[1] / a2]
    if len(a) >= 3 and len(A) >= 3:
        a3 = a[2]
        out.append(A[2] / a2 - (a3 / a2**2) * A[1])
        if len(a) >= 4 and len(A) >= 4:
            a4 = a[3]
            out.append(A[3] / a2 - (a3 / a2**2) * A[2] + (a3**2 / a2**3 - a4 / a2**2) * A[1])
    return out


def laurent_from_taylor(ts, alpha: complex, tol: float) -> LaurentSeries:
    """Laurent series of M about ``ts.lam0`` from a fitted Taylor series of Psi."""
    return laurent_from_coeffs(ts.coeffs, alpha, tol, ts.lam0)
