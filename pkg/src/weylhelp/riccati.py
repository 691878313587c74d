"""Psi = (alpha I + M^{-1})^{-1} by backward integration of a matrix Riccati equation.

Shooting ``J Z' = S Z`` from ``Z(X) = [0; I]`` and writing ``Z = [U; V]``, the
matrix ``W = U V^{-1}`` at ``x = 0`` fixes both M-matrices on the truncated
interval.  The sign conventions used throughout the package are

    M_D = W(0)^{-1},      M_N = -W(0),      so  M_D M_N = -I,

and with them both matrices are Nevanlinna (positive imaginary part in the
upper half plane) with negative semi-definite residues.

``Gamma(x) = (alpha I + W(x))^{-1}`` obeys a Riccati equation with no
singularity at the poles of M, starts from ``Gamma(X) = I / alpha`` and ends at
``Gamma(0) = Psi_D``.  For the Neumann matrix the same equation is run on the
rotated system ``(u, v) -> (v, -u)``, whose W is ``-W^{-1}``; its Gamma starts
from zero and ends at ``Psi_N``, which the same M formula turns into ``-W = M_N``.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import mat2
from .odeint import IntegratorSettings, integrate
from .problem import S12, S21, Problem, SBlocks, SingularCoefficientError

__all__ = [
    "BoundaryCondition", "DIRICHLET", "NEUMANN", "PsiValue", "PoleProximityError", "SymmetryWarning",
    "gamma_rhs", "rotate_blocks", "compute_psi", "compute_psi_batch", "m_from_psi",
    "m_from_psi_matrix", "make_psi_value", "as_bc", "DEFAULT_ALPHA",
]



class BoundaryCondition(str, enum.Enum):
    """Dirichlet: u(0) = 0 (y = y' = 0).  Neumann: v(0) = 0 (p y'' = -(p y'')' + s y' = 0)."""

    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"

    def __str__(self) -> str:
        return self.value


DIRICHLET = BoundaryCondition.DIRICHLET
NEUMANN = BoundaryCondition.NEUMANN
DEFAULT_ALPHA = 1 + 1j
POLE_DENOMINATOR_FLOOR = 1e-13


class PoleProximityError(ArithmeticError):
    """M cannot be formed from Psi this close to a pole; expand in a Laurent series instead."""


class SymmetryWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class PsiValue:
    lam: complex
    alpha: complex
    psi: np.ndarray
    label: str = ""
    bc: BoundaryCondition = DIRICHLET
    symmetry_defect: float = 0.0
    symmetry_warning: bool = False


def gamma_rhs(blocks: SBlocks, gamma, alpha: complex) -> np.ndarray:
    """Right-hand side of the Riccati equation for ``Gamma = (alpha I + U V^{-1})^{-1}``."""
    S11, S12_, S21_, S22 = (np.asarray(b) for b in blocks)
    G = np.asarray(gamma, dtype=complex)
    P = mat2.I2 - alpha * G
    return -(G @ S21_ @ P + P @ S12_ @ G + P @ S11 @ P + G @ S22 @ G)


def rotate_blocks(blocks: SBlocks) -> SBlocks:
    """Blocks of the system satisfied by ``(v, -u)``."""
    S11, S12_, S21_, S22 = blocks
    return SBlocks(S22, -S21_, -S12_, S11)


def as_bc(bc) -> BoundaryCondition:
    try:
        return BoundaryCondition(str(bc).lower())
    except ValueError:
        raise ValueError(f"unknown boundary condition {bc!r}") from None


def _batched_rhs(prob: Problem, lams: np.ndarray, alpha: complex, bc):
    lams = np.asarray(lams, dtype=complex)
    rotated = bc == NEUMANN
    n = lams.shape[0]
    lam_block = np.zeros((n, 2, 2), dtype=complex)   # [[lam w - q, 0], [0, -s]]
    p_block = np.zeros((1, 2, 2), dtype=complex)     # [[0, 0], [0, 1/p]]
    if rotated:
        B11, B12, B21, B22 = p_block, -S21[None], -S12[None], lam_block
    else:
        B11, B12, B21, B22 = lam_block, S12[None], S21[None], p_block
    I2 = mat2.I2[None]

    def rhs(x, G):
        p, s, q, w = prob.coefficients(x)
        if p == 0.0:
            raise SingularCoefficientError(f"p vanishes at x = {x!r}")
        lam_block[:, 0, 0] = lams * w - q
        lam_block[:, 1, 1] = -s
        p_block[0, 1, 1] = 1.0 / p
        P = I2 - alpha * G
        return -(G @ B21 @ P + P @ B12 @ G + P @ B11 @ P + G @ B22 @ G)

    return rhs


def compute_psi_batch(prob: Problem, lams: Iterable[complex], alpha: complex = DEFAULT_ALPHA,
                      settings: IntegratorSettings | None = None,
                      bc=DIRICHLET) -> np.ndarray:
    """Psi at every ``lam`` in one shared-step integration; returns shape ``(n, 2, 2)``."""
    bc = as_bc(bc)
    lams = np.atleast_1d(np.asarray(list(lams) if not isinstance(lams, np.ndarray) else lams,
                                    dtype=complex))
    _check_alpha(lams, alpha)
    settings = settings or IntegratorSettings()
    n = lams.shape[0]
    if bc == DIRICHLET:
        G0 = np.broadcast_to(mat2.I2 / alpha, (n, 2, 2)).copy()
    else:
        G0 = np.zeros((n, 2, 2), dtype=complex)
    rhs = _batched_rhs(prob, lams, alpha, bc)
    return integrate(rhs, prob.X, 0.0, G0, settings)


def _check_alpha(lams: np.ndarray, alpha: complex) -> None:
    if alpha == 0:
        raise ValueError("alpha must be non-zero")
    if complex(alpha).imag == 0 and np.any(lams.imag == 0):
        raise ValueError("real lambda needs alpha with non-zero imaginary part")


def compute_psi(prob: Problem, lam: complex, alpha: complex = DEFAULT_ALPHA,
                settings: IntegratorSettings | None = None, bc=DIRICHLET) -> PsiValue:
    settings = settings or IntegratorSettings()
    psi = compute_psi_batch(prob, [lam], alpha, settings, bc)[0]
    return make_psi_value(prob, lam, alpha, psi, settings, bc)


def make_psi_value(prob: Problem, lam: complex, alpha: complex, psi: np.ndarray,
                   settings: IntegratorSettings, bc) -> PsiValue:
    defect = abs(psi[0, 1] - psi[1, 0])
    flagged = defect > 1e4 * settings.rel_tol
    if flagged:
        warnings.warn(f"Psi symmetry defect {defect:.3g} at lambda = {lam}", SymmetryWarning,
                      stacklevel=3)
    return PsiValue(complex(lam), complex(alpha), psi, prob.label, as_bc(bc), float(defect),
                    flagged)


def m_from_psi_matrix(psi, alpha: complex) -> np.ndarray:
    """``M = (Psi - alpha det(Psi) I) / (1 - alpha tr(Psi) + alpha^2 det(Psi))``."""
    psi = np.asarray(psi, dtype=complex)
    d = mat2.det(psi)
    denom = 1.0 - alpha * mat2.trace(psi) + alpha**2 * d
    floor = POLE_DENOMINATOR_FLOOR * (1.0 + abs(alpha) ** 2 * np.max(np.abs(psi), axis=(-2, -1)) ** 2)
    if np.any(np.abs(denom) <= floor):
        raise PoleProximityError(
            "denominator 1 - alpha tr(Psi) + alpha^2 det(Psi) vanishes: lambda is at a pole of M; "
            "use the Laurent expansion instead")
    return (psi - (alpha * d)[..., None, None] * mat2.I2) / denom[..., None, None]


def m_from_psi(value: PsiValue) -> np.ndarray:
    return m_from_psi_matrix(value.psi, value.alpha)

