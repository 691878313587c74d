"""Fourth-order Sturm-Liouville problems ((p y'')' - (s y'))' + q y = lambda w y on [0, X].

The equation is written as the Hamiltonian system ``J z' = S(x; lambda) z`` for
the quasi-derivative vector ``z = (y, y', -(p y'')' + s y', p y'')``, with

    S = [[lambda w - q, 0,  0, 0  ],
         [0,           -s,  1, 0  ],
         [0,            1,  0, 0  ],
         [0,            0,  0, 1/p]]

and the 2x2 blocks of S are what the Riccati integrator consumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .expr import Expr, compile_expr, parse, to_text

__all__ = [
    "CoefficientSet", "Problem", "SBlocks", "ProblemError", "SingularCoefficientError",
    "s_blocks", "load_problem", "parse_problem", "bundled_problem", "BUNDLED",
]

POSITIVITY_GRID = 1000
BUNDLED = ("eq1", "eq2", "eq3")

S12 = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
S21 = S12.T.copy()


class ProblemError(ValueError):
    pass


class SingularCoefficientError(ProblemError, ArithmeticError):
    pass


@dataclass(frozen=True)
class CoefficientSet:
    p: Expr
    s: Expr
    q: Expr
    w: Expr = field(default_factory=lambda: parse("1"))

    @classmethod
    def from_text(cls, p: str, s: str, q: str, w: str = "1") -> "CoefficientSet":
        return cls(parse(p), parse(s), parse(q), parse(w))


class SBlocks(NamedTuple):
    S11: np.ndarray
    S12: np.ndarray
    S21: np.ndarray
    S22: np.ndarray

    def full(self) -> np.ndarray:
        return np.block([[self.S11, self.S12], [self.S21, self.S22]])


@dataclass(frozen=True)
class Problem:
    coeffs: CoefficientSet
    truncation_X: float
    label: str = ""
    _funcs: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        X = float(self.truncation_X)
        if not (math.isfinite(X) and X > 0):
            raise ProblemError(f"truncation X must be a positive finite number, got {X!r}")
        object.__setattr__(self, "truncation_X", X)
        c = self.coeffs
        funcs = tuple(compile_expr(e) for e in (c.p, c.s, c.q, c.w))
        object.__setattr__(self, "_funcs", funcs)
        fp, _, _, fw = funcs
        grid = np.linspace(0.0, X, POSITIVITY_GRID)
        if not all(fp(x) > 0 for x in grid[1:]):
            raise ProblemError("p must be positive on (0, X]")
        if not all(fw(x) > 0 for x in grid):
            raise ProblemError("w must be positive on [0, X]")

    @property
    def X(self) -> float:
        return self.truncation_X

    def coefficients(self, x: float) -> tuple[float, float, float, float]:
        """``(p, s, q, w)`` at ``x``."""
        fp, fs, fq, fw = self._funcs
        return fp(x), fs(x), fq(x), fw(x)

    def with_X(self, X: float) -> "Problem":
        return Problem(self.coeffs, X, self.label)

    def to_config(self) -> str:
        c = self.coeffs
        lines = [f'label = "{self.label}"']
        for key in ("p", "s", "q", "w"):
            lines.append(f'{key} = "{to_text(getattr(c, key))}"')
        lines.append(f"X = {self.truncation_X!r}")
        return "\n".join(lines) + "\n"


def s_blocks(prob: Problem, x: float, lam: complex) -> SBlocks:
    """The four 2x2 blocks of ``S(x; lam)``."""
    p, s, q, w = prob.coefficients(x)
    if p == 0.0:
        raise SingularCoefficientError(f"p vanishes at x = {x!r}")
    S11 = np.array([[lam * w - q, 0.0], [0.0, -s]], dtype=complex)
    S22 = np.array([[0.0, 0.0], [0.0, 1.0 / p]], dtype=complex)
    return SBlocks(S11, S12.copy(), S21.copy(), S22)


def _unquote(value: str, lineno: int) -> str:
    """Strip optional quotes and a trailing ``# comment``."""
    value = value.strip()
    if value[:1] in ('"', "'"):
        end = value.find(value[0], 1)
        if end < 0:
            raise ProblemError(f"line {lineno}: unterminated string")
        rest = value[end + 1:].strip()
        if rest and not rest.startswith("#"):
            raise ProblemError(f"line {lineno}: unexpected text after string: {rest!r}")
        return value[1:end]
    return value.split("#", 1)[0].strip()


def parse_problem(text: str, X: float | None = None) -> Problem:
    """Build a problem from ``key = value`` config text; ``X`` overrides the file."""
    fields: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ProblemError(f"line {lineno}: expected 'key = value'")
        key = key.strip()
        if key not in ("p", "s", "q", "w", "X", "label"):
            raise ProblemError(f"line {lineno}: unknown key {key!r}")
        fields[key] = _unquote(value, lineno)
    missing = [k for k in ("p", "s", "q") if k not in fields]
    if X is None and "X" not in fields:
        missing.append("X")
    if missing:
        raise ProblemError(f"missing keys: {', '.join(missing)}")
    coeffs = CoefficientSet.from_text(fields["p"], fields["s"], fields["q"], fields.get("w", "1"))
    if X is None:
        try:
            X = float(fields["X"])
        except ValueError:
            raise ProblemError(f"X is not a number: {fields['X']!r}") from None
    return Problem(coeffs, X, fields.get("label", ""))


def load_problem(path: str | Path, X: float | None = None) -> Problem:
    """Load a config file, or one of the bundled fixtures by name (eq1, eq2, eq3)."""
    if str(path) in BUNDLED and not Path(path).exists():
        return bundled_problem(str(path), X)
    return parse_problem(Path(path).read_text(encoding="utf-8"), X)


def bundled_problem(name: str, X: float | None = None) -> Problem:
    if name not in BUNDLED:
        raise ProblemError(f"no bundled problem named {name!r}")
    text = resources.files("weylhelp.fixtures").joinpath(f"{name}.cfg").read_text(encoding="utf-8")
    return parse_problem(text, X)
