"""Adaptive Dormand-Prince 5(4) integrator for matrix-valued complex ODEs.

The state may carry leading batch axes (``(..., 2, 2)``): every member shares
the step sequence, and a step is accepted only when every member passes the
mixed error test

    max |err| <= rel_tol * ||Y|| + abs_tol

where both sides are max-norms over the real and imaginary parts of that
member's entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "IntegratorSettings", "IntegrationError", "StepLimitError", "StepSizeUnderflowError",
    "integrate",
]

# Dormand & Prince (1980), RK5(4)7M.
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
# fifth-order weights minus embedded fourth-order weights
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


@dataclass(frozen=True)
class IntegratorSettings:
    rel_tol: float = 1e-9
    abs_tol: float | None = None  # None means abs_tol = rel_tol
    max_steps: int = 10_000_000
    initial_step: float | None = None

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.abs_tol is not None and not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")

    @property
    def atol(self) -> float:
        return self.rel_tol if self.abs_tol is None else self.abs_tol

    def tightened(self, factor: float) -> "IntegratorSettings":
        return IntegratorSettings(self.rel_tol * factor,
                                  None if self.abs_tol is None else self.abs_tol * factor,
                                  self.max_steps, self.initial_step)


class IntegrationError(RuntimeError):
    def __init__(self, message: str, x: float):
        super().__init__(f"{message} (reached x = {x!r})")
        self.x = x


class StepLimitError(IntegrationError):
    pass


class StepSizeUnderflowError(IntegrationError):
    pass


def _member_max(a: np.ndarray) -> np.ndarray:
    """Max over the real and imaginary parts of each member's trailing 2x2 block."""
    r = np.maximum(np.abs(a.real), np.abs(a.imag))
    return r.reshape(r.shape[:-2] + (-1,)).max(axis=-1)


def integrate(rhs: Callable[[float, np.ndarray], np.ndarray], x0: float, x1: float,
              Y0, settings: IntegratorSettings | None = None) -> np.ndarray:
    """Integrate ``Y' = rhs(x, Y)`` from ``x0`` to ``x1`` (either direction); return ``Y(x1)``."""
    settings = settings or IntegratorSettings()
    rtol, atol = settings.rel_tol, settings.atol
    Y = np.array(Y0, dtype=complex)
    if x0 == x1:
        return Y
    direction = 1.0 if x1 > x0 else -1.0
    span = abs(x1 - x0)

    x = float(x0)
    k1 = np.asarray(rhs(x, Y), dtype=complex)
    if settings.initial_step is not None:
        h = min(abs(settings.initial_step), span)
    else:
        h = _initial_step(rhs, x, Y, k1, direction, rtol, atol, span)
    min_step = 16 * np.spacing(max(abs(x0), abs(x1)))

    steps = 0
    while True:
        if steps >= settings.max_steps:
            raise StepLimitError(f"exceeded {settings.max_steps} steps", x)
        remaining = abs(x1 - x)
        last = h >= remaining
        if last:
            h = remaining
        if h < min_step:
            raise StepSizeUnderflowError("step size underflow", x)
        hs = direction * h
        ks = [k1]
        for i in range(1, 7):
            yi = Y.copy()
            for a, k in zip(_A[i], ks):
                if a:
                    yi += (hs * a) * k
            ks.append(np.asarray(rhs(x + _C[i] * hs, yi), dtype=complex))
            if i == 6:
                y_new = yi
        err = np.zeros_like(Y)
        for e, k in zip(_E, ks):
            if e:
                err += (hs * e) * k
        scale = rtol * np.maximum(_member_max(Y), _member_max(y_new)) + atol
        ratio = float(np.max(_member_max(err) / scale))
        steps += 1
        if not math.isfinite(ratio):
            h *= _MIN_FACTOR
            continue
        if ratio <= 1.0:
            x = x1 if last else x + hs
            Y = y_new
            k1 = ks[6]
            if last:
                return Y
            factor = _MAX_FACTOR if ratio == 0 else min(_MAX_FACTOR, _SAFETY * ratio ** -0.2)
            h *= factor
        else:
            h *= max(_MIN_FACTOR, _SAFETY * ratio ** -0.2)


def _initial_step(rhs, x, Y, f0, direction, rtol, atol, span) -> float:
    # Hairer, Norsett & Wanner, "Solving ODEs I", II.4
    scale = rtol * float(np.max(_member_max(Y))) + atol
    d0 = float(np.max(_member_max(Y))) / scale
    d1 = float(np.max(_member_max(f0))) / scale
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    f1 = np.asarray(rhs(x + direction * h0, Y + direction * h0 * f0), dtype=complex)
    d2 = float(np.max(_member_max(f1 - f0))) / scale / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, span)
