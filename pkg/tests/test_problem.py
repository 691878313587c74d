import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weylhelp.problem import (BUNDLED, S12, S21, CoefficientSet, Problem, ProblemError,
                              bundled_problem, load_problem, parse_problem, s_blocks)


def make(p="1", s="0", q="0", w="1", X=5.0):
    return Problem(CoefficientSet.from_text(p, s, q, w), X)


def test_trivial_blocks():
    b = s_blocks(make(), 3.3, 0.0)
    assert np.array_equal(b.S11, np.zeros((2, 2)))
    assert np.array_equal(b.S22, [[0, 0], [0, 1]])


def test_square_of_harmonic_blocks_at_one():
    b = s_blocks(bundled_problem("eq2"), 1.0, 0.0)
    assert np.allclose(b.S11, [[1, 0], [0, -2]], atol=0)
    assert np.allclose(b.S22, [[0, 0], [0, 1]], atol=0)


@pytest.mark.parametrize("name", BUNDLED)
def test_off_diagonal_blocks_constant(name):
    prob = bundled_problem(name)
    for x, lam in ((0.0, 0.0), (2.5, 3 + 1j), (prob.X, -7.0)):
        b = s_blocks(prob, x, lam)
        assert np.array_equal(b.S12, [[0, 0], [1, 0]])
        assert np.array_equal(b.S21, [[0, 1], [0, 0]])
    assert np.array_equal(S12, S21.T)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 10), st.floats(-50, 50), st.sampled_from(BUNDLED))
def test_full_matrix_symmetric_and_real(x, lam, name):
    S = s_blocks(bundled_problem(name), x, lam).full()
    assert np.array_equal(S, S.T)
    assert np.all(S.imag == 0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 10), st.floats(-50, 50))
def test_linear_in_lambda(x, lam):
    prob = make("1+x^2", "x", "cos(x)", "2+sin(x)", X=10)
    diff = s_blocks(prob, x, lam).full() - s_blocks(prob, x, 0.0).full()
    expected = np.zeros((4, 4))
    expected[0, 0] = lam * (2 + np.sin(x))
    # exact up to the rounding of the single subtraction lam*w - q
    slack = 4 * np.finfo(float).eps * (abs(lam) * 3 + 1)
    assert np.max(np.abs(diff - expected)) <= slack


def test_positivity_checks():
    with pytest.raises(ProblemError, match=r"p must be positive on \(0, X\]"):
        make(p="0")
    with pytest.raises(ProblemError, match="w must be positive"):
        make(w="x-1")
    # p may vanish at the left endpoint only
    make(p="x")
    with pytest.raises(ProblemError):
        make(X=0)


def test_config_parsing_and_round_trip(tmp_path):
    text = """
    # comment line
    label = "demo"
    p = 1
    s = "2*x^2"   # trailing comment
    q = x^4-2
    X = 12.5
    """
    prob = parse_problem(text)
    assert prob.X == 12.5 and prob.label == "demo"
    assert prob.coefficients(1.0) == (1.0, 2.0, -1.0, 1.0)
    path = tmp_path / "demo.cfg"
    path.write_text(prob.to_config())
    again = load_problem(path, X=3.0)
    assert again.X == 3.0
    for x in (0.0, 0.7, 2.9):
        assert again.coefficients(x) == prob.coefficients(x)


@pytest.mark.parametrize("text", ["p = 1\ns = 0\n", "p = 1\ns = 0\nq = 0\nX = 1\nzz = 2\n",
                                  "p = 1\ns = 0\nq = (\nX = 1\n", "p 1\n"])
def test_bad_configs(text):
    with pytest.raises((ProblemError, ValueError)):
        parse_problem(text)


def test_bundled_truncation_points():
    assert [bundled_problem(n).X for n in BUNDLED] == [10.0, 20.0, 10.0]
    assert bundled_problem("eq1", X=100).X == 100.0
