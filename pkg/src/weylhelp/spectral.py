"""M-matrix evaluation, pole location, residues, ranks and the HELP verdict."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import mat2
from .laurent import (Branch, LaurentSeries, constant_term, laurent_from_taylor,
                      residue_sensitivity)
from .odeint import IntegratorSettings
from .problem import Problem
from .riccati import (DEFAULT_ALPHA, DIRICHLET, NEUMANN, BoundaryCondition, PoleProximityError,
                      as_bc, compute_psi_batch, m_from_psi_matrix)
from .taylor import DEFAULT_TARGET, TaylorSeries, TaylorStatus, adaptive_taylor

__all__ = [
    "BoundaryCondition", "ResidueReport", "HelpOutcome", "HelpVerdict", "SectorSample",
    "SectorScan", "PoleNotFoundError", "evaluate_m", "evaluate_m_batch", "pole_function",
    "locate_pole", "locate_poles", "residue_report", "numerical_rank", "bennewitz_check",
    "help_verdict", "sector_scan", "SIGN_CONVENTION",
]

SIGN_CONVENTION = "M_D = (U V^-1)(0)^-1, M_N = -(U V^-1)(0), shooting U(X) = 0, V(X) = I"
GRID_POINTS = 64
GOLDEN_MAX_ITER = 200
LOCATE_XTOL = 1e-7                # relative width of the final golden-section bracket
RESIDUE_K = 2
# |1 - alpha tr Psi0 + alpha^2 det Psi0| above this (times 1 + |alpha|^2) means no pole at lam0
POLE_PRESENCE_TOL = 1e-6

_INV_PHI = (math.sqrt(5) - 1) / 2


class PoleNotFoundError(RuntimeError):
    def __init__(self, message: str, grid_min_lambda: float, grid_min_value: float):
        super().__init__(message)
        self.grid_min_lambda = grid_min_lambda
        self.grid_min_value = grid_min_value


def evaluate_m_batch(prob: Problem, bc, lams, alpha: complex = DEFAULT_ALPHA,
                     settings: IntegratorSettings | None = None) -> np.ndarray:
    psi = compute_psi_batch(prob, lams, alpha, settings, as_bc(bc))
    return m_from_psi_matrix(psi, alpha)


def evaluate_m(prob: Problem, bc, lam: complex, alpha: complex = DEFAULT_ALPHA,
               settings: IntegratorSettings | None = None) -> np.ndarray:
    """``M_D(lam)`` or ``M_N(lam)`` on the truncated interval."""
    return evaluate_m_batch(prob, bc, [lam], alpha, settings)[0]


def pole_function(prob: Problem, bc, lams, alpha: complex = DEFAULT_ALPHA,
                  settings: IntegratorSettings | None = None) -> np.ndarray:
    """``1 - alpha tr Psi + alpha^2 det Psi``; its zeros are the poles of M."""
    psi = compute_psi_batch(prob, lams, alpha, settings, as_bc(bc))
    return 1 - alpha * mat2.trace(psi) + alpha**2 * mat2.det(psi)


def _default_pole_tol(alpha: complex) -> float:
    return 1e-8 * (1 + abs(alpha) ** 2)


def _golden(f, a: float, b: float, xtol: float, max_iter: int, target: float = 0.0):
    """Golden-section minimisation of ``f`` on [a, b].

    Runs until the bracket is narrower than ``xtol`` and the best value is
    below ``target``, or the bracket reaches rounding level, or ``max_iter``.
    """
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    floor = 8 * np.spacing(max(abs(a), abs(b), 1.0))
    for _ in range(max_iter):
        width = b - a
        if width <= floor or (width <= xtol and min(fc, fd) < target):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def _check_real_evaluation(alpha: complex):
    if complex(alpha).imag == 0:
        raise ValueError("locating poles on the real axis needs alpha with Im(alpha) != 0")


def _refine(prob, bc, grid, values, i, alpha, settings, pole_tol):
    def absg(lam):
        return float(abs(pole_function(prob, bc, [lam], alpha, settings)[0]))

    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    # minimise fully rather than stopping at the first |g| < pole_tol: at a
    # rank-2 pole |g| has a double zero and is flat over a wide interval
    xtol = LOCATE_XTOL * max(1.0, abs(lo), abs(hi))
    lam, val = _golden(absg, lo, hi, xtol, GOLDEN_MAX_ITER, pole_tol)
    if values[i] < val:
        lam, val = grid[i], values[i]
    return float(lam), float(val)


def _scan(prob, bc, bracket, alpha, settings, grid_points):
    _check_real_evaluation(alpha)
    lo, hi = map(float, bracket)
    if not hi > lo:
        raise ValueError("bracket must have positive width")
    grid = np.linspace(lo, hi, grid_points)
    values = np.abs(pole_function(prob, bc, grid.astype(complex), alpha, settings))
    return grid, values


def locate_poles(prob: Problem, bc, bracket: tuple[float, float],
                 alpha: complex = DEFAULT_ALPHA, settings: IntegratorSettings | None = None,
                 grid_points: int = GRID_POINTS, pole_tol: float | None = None) -> list[float]:
    """Every pole of M found in ``bracket``: each grid local minimum of |g| refined below ``pole_tol``."""
    pole_tol = _default_pole_tol(alpha) if pole_tol is None else pole_tol
    grid, values = _scan(prob, bc, bracket, alpha, settings, grid_points)
    poles = []
    for i in range(len(grid)):
        left = values[i - 1] if i > 0 else np.inf
        right = values[i + 1] if i + 1 < len(grid) else np.inf
        if values[i] <= left and values[i] <= right:
            lam, val = _refine(prob, bc, grid, values, i, alpha, settings, pole_tol)
            if val < pole_tol and not any(abs(lam - q) <= 1e-6 * max(1.0, abs(q))
                                          for q in poles):
                poles.append(lam)
    return poles


def locate_pole(prob: Problem, bc, bracket: tuple[float, float],
                alpha: complex = DEFAULT_ALPHA, settings: IntegratorSettings | None = None,
                grid_points: int = GRID_POINTS, pole_tol: float | None = None) -> float:
    """The pole of M nearest the deepest grid minimum of |g| in ``bracket``."""
    pole_tol = _default_pole_tol(alpha) if pole_tol is None else pole_tol
    grid, values = _scan(prob, bc, bracket, alpha, settings, grid_points)
    i = int(np.argmin(values))
    lam, val = _refine(prob, bc, grid, values, i, alpha, settings, pole_tol)
    if val >= pole_tol:
        raise PoleNotFoundError(
            f"no pole of M_{as_bc(bc).value[0].upper()} in {tuple(bracket)}: smallest "
            f"|g| = {val:.3g} at lambda = {lam:.10g}", lam, val)
    return lam


def numerical_rank(m, scale_tol: float = 1e-6) -> int:
    """Singular values above ``scale_tol`` times the largest, from the eigenvalues of m^H m."""
    if not scale_tol > 0:
        raise ValueError("scale_tol must be positive")
    m = np.asarray(m, dtype=complex)
    fro2 = float(np.sum(np.abs(m) ** 2))
    if fro2 == 0.0:
        return 0
    d = abs(complex(mat2.det(m)))
    disc = math.sqrt(max(fro2 * fro2 - 4 * d * d, 0.0))
    s1 = math.sqrt((fro2 + disc) / 2)
    s2 = d / s1                          # s1 * s2 = |det|, avoids cancellation
    return 1 + int(s2 > scale_tol * s1)


@dataclass
class ResidueReport:
    bc: BoundaryCondition
    lam0: float
    alpha: complex
    residue: np.ndarray
    realness_defect: float
    det_residue: complex
    a1: complex
    numerical_rank: int
    error_estimate: float
    X: float
    tol: float
    has_pole: bool = True
    a0: complex = 0j
    branch: Branch | None = None
    scale_tol: float = 1e-6
    taylor_status: TaylorStatus = TaylorStatus.OK
    m_final: int = 0
    mu_final: complex = 0j
    convention: str = SIGN_CONVENTION
    label: str = ""
    taylor: TaylorSeries | None = field(default=None, repr=False)
    laurent: LaurentSeries | None = field(default=None, repr=False)

    @property
    def abs_a1(self) -> float:
        return abs(self.a1)

    @property
    def target_reached(self) -> bool:
        return self.taylor_status is TaylorStatus.OK


def residue_report(prob: Problem, bc, lam0: float, alpha: complex = DEFAULT_ALPHA,
                   settings: IntegratorSettings | None = None,
                   target_acc: float = DEFAULT_TARGET, k: int = RESIDUE_K,
                   branch_tol: float | None = None) -> ResidueReport:
    """Residue of M_D or M_N at the real point ``lam0`` (zero when ``lam0`` is not a pole)."""
    bc = as_bc(bc)
    settings = settings or IntegratorSettings()
    tol = settings.rel_tol if branch_tol is None else branch_tol
    ts = adaptive_taylor(prob, lam0, k, alpha, settings, target_acc, bc)
    a0 = constant_term(ts.coeffs, alpha)
    common = dict(bc=bc, lam0=float(lam0), alpha=complex(alpha), X=prob.X, tol=tol, a0=a0,
                  taylor_status=ts.status, m_final=ts.m_final, mu_final=ts.mu_final,
                  label=prob.label, taylor=ts)
    if abs(a0) > POLE_PRESENCE_TOL * (1 + abs(alpha) ** 2):
        zero = np.zeros((2, 2), dtype=complex)
        err = float(max(ts.errors[: k + 1]))
        return ResidueReport(residue=zero, realness_defect=0.0, det_residue=0j, a1=0j,
                             numerical_rank=0, error_estimate=err, has_pole=False, **common)
    ls = laurent_from_taylor(ts, alpha, tol)
    res = ls.residue
    realness = float(np.max(np.abs(res.imag)))
    propagated = residue_sensitivity(ts.coeffs, ts.errors, alpha, ls.branch)
    err = max(propagated, realness)
    norm = float(np.max(np.abs(res)))
    scale_tol = max(1e-6, 10 * err / norm) if norm else 1e-6
    return ResidueReport(residue=res, realness_defect=realness,
                         det_residue=complex(mat2.det(res)), a1=ls.a_coeffs[0],
                         numerical_rank=numerical_rank(res, scale_tol), error_estimate=err,
                         branch=ls.branch, scale_tol=scale_tol, laurent=ls, **common)


class HelpOutcome(enum.Enum):
    INEQUALITY_HOLDS = "InequalityHolds"
    CRITERION_NOT_MET = "CriterionNotMet"


@dataclass(frozen=True)
class HelpVerdict:
    rank_D: int
    rank_N: int
    outcome: HelpOutcome
    n: int = 2
    lam0: float | None = None
    notes: str = ""

    def summary(self) -> str:
        total = self.rank_D + self.rank_N
        rel = "=" if total == self.n else "!="
        return f"{self.outcome.value} (rank {self.rank_D} + rank {self.rank_N} {rel} {self.n})"


def bennewitz_check(rank_D: int, rank_N: int, lam0: float | None = None) -> HelpVerdict:
    """A HELP inequality holds when the residue ranks of M_D and M_N add up to 2."""
    for r in (rank_D, rank_N):
        if r not in (0, 1, 2):
            raise ValueError(f"rank {r!r} is not one of 0, 1, 2")
    if rank_D + rank_N == 2:
        return HelpVerdict(rank_D, rank_N, HelpOutcome.INEQUALITY_HOLDS, lam0=lam0,
                           notes="rank criterion met: a valid HELP inequality exists")
    return HelpVerdict(rank_D, rank_N, HelpOutcome.CRITERION_NOT_MET, lam0=lam0,
                       notes="rank criterion not met: no inequality is expected, but "
                             "non-existence is conjectured, not proved")


def help_verdict(prob: Problem, lam0: float, alpha: complex = DEFAULT_ALPHA,
                 settings: IntegratorSettings | None = None,
                 target_acc: float = DEFAULT_TARGET):
    """Residue reports for both conditions at ``lam0`` and the resulting verdict."""
    rd = residue_report(prob, DIRICHLET, lam0, alpha, settings, target_acc)
    rn = residue_report(prob, NEUMANN, lam0, alpha, settings, target_acc)
    return bennewitz_check(rd.numerical_rank, rn.numerical_rank, lam0), rd, rn


@dataclass(frozen=True)
class SectorSample:
    rho: float
    theta: float
    lam: complex                 # the shifted local variable lam - lam0
    quadrant: int                # 1 or 3
    min_eig: float               # of Im(-lam^2 M_N) (quadrant 1) or Im(lam^2 M_N) (quadrant 3)
    error: str = ""

    @property
    def positive(self) -> bool:
        return not self.error and self.min_eig > 0


@dataclass
class SectorScan:
    lam0: float
    samples: list[SectorSample]

    def quadrant(self, q: int) -> list[SectorSample]:
        return [s for s in self.samples if s.quadrant == q]

    @property
    def all_positive(self) -> bool:
        return all(s.positive for s in self.samples)


def _quadrant(theta: float) -> int:
    t = theta % (2 * math.pi)
    if 0 < t < math.pi / 2:
        return 1
    if math.pi < t < 1.5 * math.pi:
        return 3
    raise ValueError(f"theta = {theta!r} is not strictly inside the first or third quadrant")


def sector_form(m, lam_local: complex, quadrant: int) -> float:
    """Smallest eigenvalue of the symmetric part of Im(-+lam^2 M)."""
    sign = -1.0 if quadrant == 1 else 1.0
    h = (sign * lam_local**2 * np.asarray(m)).imag
    return float(np.linalg.eigvalsh((h + h.T) / 2)[0])


def sector_scan(prob: Problem, lam0: float, rhos: Sequence[float], thetas: Sequence[float],
                alpha: complex = DEFAULT_ALPHA, settings: IntegratorSettings | None = None,
                mirror: bool = True) -> SectorScan:
    """Sample the sector condition on M_N about ``lam0``.

    First-quadrant angles are mirrored into the third quadrant unless
    ``mirror`` is false; third-quadrant angles are used as given.
    """
    points = []
    for theta in thetas:
        q = _quadrant(theta)
        points.append((theta, q))
        if mirror and q == 1:
            points.append((theta + math.pi, 3))
    grid = [(float(r), float(t), q, r * complex(math.cos(t), math.sin(t)))
            for r in rhos if r > 0 for t, q in points]
    if any(r <= 0 for r in rhos):
        raise ValueError("rho must be positive")
    if not grid:
        return SectorScan(float(lam0), [])
    psi = compute_psi_batch(prob, [lam0 + g[3] for g in grid], alpha, settings, NEUMANN)
    samples = []
    for (r, t, q, lam), p in zip(grid, psi):
        try:
            m = m_from_psi_matrix(p, alpha)
        except PoleProximityError as exc:
            samples.append(SectorSample(r, t, lam, q, float("nan"), str(exc)))
            continue
        samples.append(SectorSample(r, t, lam, q, sector_form(m, lam, q)))
    return SectorScan(float(lam0), samples)
