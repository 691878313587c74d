import math

import numpy as np
import pytest
import scipy.linalg

from weylhelp.odeint import IntegratorSettings, StepLimitError, integrate


def expm_series(C):
    """Scaling and squaring with a plain Taylor sum; independent of the integrator."""
    s = max(0, int(np.ceil(np.log2(max(np.max(np.abs(C)) * 4, 1.0)))))
    A = C / 2**s
    term = np.eye(len(C), dtype=complex)
    out = term.copy()
    for k in range(1, 30):
        term = term @ A / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def _exp_error(tol):
    Y = integrate(lambda x, Y: Y, 0.0, 1.0, np.eye(2, dtype=complex), IntegratorSettings(tol))
    return float(np.max(np.abs(Y - math.e * np.eye(2))))


def test_exponential():
    tol = 1e-9
    assert _exp_error(tol) <= 10 * tol * math.e


def test_zero_field_is_constant():
    Y0 = np.array([[1 + 2j, 3], [4, 5j]])
    Y1 = integrate(lambda x, Y: np.zeros_like(Y), 0.0, 7.0, Y0, IntegratorSettings())
    assert np.array_equal(Y1, Y0)


def test_linear_system_against_series_oracle():
    rng = np.random.default_rng(3)
    C = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    tol = 1e-9
    Y1 = integrate(lambda x, Y: C @ Y, 0.0, 1.0, np.eye(2, dtype=complex),
                   IntegratorSettings(tol))
    E = expm_series(C)
    assert np.allclose(E, scipy.linalg.expm(C), atol=1e-12)
    assert np.max(np.abs(Y1 - E)) <= 100 * tol * max(1.0, np.max(np.abs(E)))


def test_halving_tolerance_reduces_error():
    for tol in (1e-6, 1e-8):
        assert _exp_error(tol / 2) * 1.5 <= _exp_error(tol)


def test_reverse_integration_returns():
    tol = 1e-9
    s = IntegratorSettings(tol)
    Y0 = np.eye(2, dtype=complex)
    Y1 = integrate(lambda x, Y: Y, 0.0, 1.0, Y0, s)
    back = integrate(lambda x, Y: Y, 1.0, 0.0, Y1, s)
    assert np.max(np.abs(back - Y0)) <= 100 * tol


def test_batched_members_match_individual_runs():
    lams = np.array([1.0, -2.0 + 1j, 0.5j])
    s = IntegratorSettings(1e-10)
    rhs = lambda x, Y: lams[:, None, None] * Y
    Y = integrate(rhs, 0.0, 1.0, np.broadcast_to(np.eye(2, dtype=complex), (3, 2, 2)).copy(), s)
    for i, lam in enumerate(lams):
        assert np.allclose(Y[i], np.exp(lam) * np.eye(2), rtol=1e-8, atol=1e-9)


def test_step_limit():
    with pytest.raises(StepLimitError):
        integrate(lambda x, Y: -50 * Y, 0.0, 10.0, np.ones((2, 2), complex),
                  IntegratorSettings(1e-12, max_steps=5))


def test_settings_validation():
    with pytest.raises(ValueError):
        IntegratorSettings(0.0)
    assert IntegratorSettings(1e-9).atol == 1e-9
    assert IntegratorSettings(1e-9).tightened(0.1).rel_tol == pytest.approx(1e-10)
