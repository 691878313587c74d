"""Taylor coefficients of Psi about a real point from samples off the real axis.

Psi is sampled at ``lam0 + mu / 2**j`` (``j = 0..m``) and the degree-m
interpolant is recovered by a dual Vandermonde solve on the nodes
``2**-m, ..., 1/2, 1``.  ``adaptive_taylor`` chooses ``m`` and ``mu``:
grow ``m`` from ``k + 1`` while the leading ``k + 1`` coefficients keep
settling (at most 7), then double ``mu`` (never past ``|mu| = 0.5``) while
they keep settling or until the target accuracy is met.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from .odeint import IntegratorSettings
from .problem import Problem
from .riccati import DEFAULT_ALPHA, DIRICHLET, PsiValue, compute_psi_batch, make_psi_value
from .vandermonde import solve_dual

__all__ = ["TaylorStatus", "TaylorSeries", "FitRecord", "sample_psi", "fit_taylor",
           "adaptive_taylor", "MU_START", "MU_MAX", "M_MAX", "DIVERGENCE_FACTOR"]

log = logging.getLogger(__name__)

MU_START = 0.025j
MU_MAX = 0.5
M_MAX = 7
K_MAX = 4
DIVERGENCE_FACTOR = 2.0
DEFAULT_TARGET = 1e-6


class TaylorStatus(enum.Enum):
    OK = "OK"
    TARGET_NOT_REACHED = "TargetNotReached"


@dataclass(frozen=True)
class FitRecord:
    m: int
    mu: complex
    change: float        # sup-norm change of Psi_0..Psi_k against the previous fit
    accepted: bool


@dataclass
class TaylorSeries:
    lam0: complex
    mu_final: complex
    m_final: int
    k: int
    coeffs: np.ndarray                 # (m_final + 1, 2, 2)
    errors: list[float]
    status: TaylorStatus
    history: list[FitRecord] = field(default_factory=list)
    samples_used: int = 0

    @property
    def target_met(self) -> bool:
        return self.status is TaylorStatus.OK

    def evaluate(self, lam_offset: complex) -> np.ndarray:
        powers = lam_offset ** np.arange(len(self.coeffs))
        return np.tensordot(powers, self.coeffs, axes=1)


def _offsets(mu: complex, m: int) -> list[complex]:
    return [mu / 2**j for j in range(m + 1)]


def sample_psi(prob: Problem, lam0: complex, mu: complex, m: int,
               alpha: complex = DEFAULT_ALPHA, settings: IntegratorSettings | None = None,
               bc=DIRICHLET) -> list[PsiValue]:
    """Psi at ``lam0 + mu / 2**j`` for ``j = 0..m``."""
    if complex(mu).imag == 0:
        raise ValueError("mu must have a non-zero imaginary part")
    if m < 0:
        raise ValueError("m must be non-negative")
    settings = settings or IntegratorSettings()
    lams = [lam0 + d for d in _offsets(mu, m)]
    psis = compute_psi_batch(prob, lams, alpha, settings, bc)
    return [make_psi_value(prob, lam, alpha, psi, settings, bc) for lam, psi in zip(lams, psis)]


def fit_taylor(samples, mu: complex, m: int) -> np.ndarray:
    """Psi_0..Psi_m from samples ordered ``j = 0..m`` (offsets ``mu, mu/2, ..., mu/2**m``)."""
    data = np.array([s.psi if isinstance(s, PsiValue) else s for s in samples], dtype=complex)
    if data.shape[0] != m + 1:
        raise ValueError(f"need {m + 1} samples, got {data.shape[0]}")
    scaled = solve_dual(data[::-1])              # a_nu * mu**nu on nodes 2**-m .. 1
    powers = complex(mu) ** np.arange(m + 1)
    return scaled / powers[:, None, None]


class _Sampler:
    """Memoises Psi at ``lam0 + offset``; offsets repeat exactly as mu and m change."""

    def __init__(self, prob, lam0, alpha, settings, bc):
        self.prob, self.lam0, self.alpha, self.settings, self.bc = prob, lam0, alpha, settings, bc
        self.cache: dict[complex, np.ndarray] = {}

    def fit(self, mu: complex, m: int) -> np.ndarray:
        offsets = _offsets(mu, m)
        todo = [d for d in offsets if d not in self.cache]
        if todo:
            psis = compute_psi_batch(self.prob, [self.lam0 + d for d in todo], self.alpha,
                                     self.settings, self.bc)
            self.cache.update(zip(todo, psis))
        return fit_taylor([self.cache[d] for d in offsets], mu, m)


def _change(a: np.ndarray, b: np.ndarray, k: int) -> float:
    return float(np.max(np.abs(a[:k + 1] - b[:k + 1])))


def adaptive_taylor(prob: Problem, lam0: complex, k: int = 3, alpha: complex = DEFAULT_ALPHA,
                    settings: IntegratorSettings | None = None,
                    target_acc: float = DEFAULT_TARGET, bc=DIRICHLET,
                    mu_start: complex = MU_START) -> TaylorSeries:
    """Adaptively fit Psi_0..Psi_k (plus the higher ones the fit produces) about ``lam0``."""
    if not 0 <= k <= K_MAX:
        raise ValueError(f"k must lie in 0..{K_MAX}")
    if not target_acc > 0:
        raise ValueError("target_acc must be positive")
    settings = settings or IntegratorSettings()
    sampler = _Sampler(prob, lam0, alpha, settings, bc)
    history: list[FitRecord] = []

    mu = complex(mu_start)
    m = k + 1
    prev = None
    best = sampler.fit(mu, m)
    history.append(FitRecord(m, mu, float("inf"), True))
    change = float("inf")

    # grow the degree
    while m < M_MAX:
        cur = sampler.fit(mu, m + 1)
        c = _change(cur, best, k)
        if c > DIVERGENCE_FACTOR * change:
            history.append(FitRecord(m + 1, mu, c, False))
            break
        history.append(FitRecord(m + 1, mu, c, True))
        prev, best, m = best, cur, m + 1
        improving = c < change
        change = c
        if not improving:
            break

    # widen the sampling radius at fixed degree; the first doubling only sets a
    # new baseline, since it differences two fits of the same degree
    baseline = True
    while change > target_acc and 2 * abs(mu) <= MU_MAX:
        cur = sampler.fit(2 * mu, m)
        c = _change(cur, best, k)
        if c > DIVERGENCE_FACTOR * change:
            history.append(FitRecord(m, 2 * mu, c, False))
            break
        history.append(FitRecord(m, 2 * mu, c, True))
        prev, best, mu = best, cur, 2 * mu
        improving = baseline or c < change
        change = c
        baseline = False
        if not improving:
            break

    errors = _coefficient_errors(best, prev)
    status = TaylorStatus.OK if change <= target_acc else TaylorStatus.TARGET_NOT_REACHED
    if status is not TaylorStatus.OK:
        log.info("Taylor target %.3g not reached at lambda0=%s (estimate %.3g)",
                 target_acc, lam0, change)
    if any(errors[i] > errors[i + 1] for i in range(min(k, len(errors) - 1))):
        log.debug("coefficient error estimates not increasing: %s", errors)
    return TaylorSeries(complex(lam0), mu, m, k, best, errors, status, history,
                        samples_used=len(sampler.cache))


def _coefficient_errors(best: np.ndarray, prev: np.ndarray | None) -> list[float]:
    errs = []
    for nu in range(len(best)):
        if prev is not None and nu < len(prev):
            errs.append(float(np.max(np.abs(best[nu] - prev[nu]))))
        else:
            errs.append(float(np.max(np.abs(best[nu]))))
    return errs
