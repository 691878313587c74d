"""Dual Vandermonde solves by the Bjorck-Pereyra recurrences.

``V^T a = g`` with ``V[k, j] = nodes[j] ** k`` is polynomial interpolation:
``sum_k a[k] nodes[j]**k = g[j]``.  The solve is O(m^2) and never forms V.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["DualVandermondeSystem", "VandermondeError", "MAX_DEGREE", "geometric_nodes",
           "bp_dual_solve", "solve_dual"]

MAX_DEGREE = 12


class VandermondeError(ValueError):
    pass


def geometric_nodes(m: int) -> np.ndarray:
    """``2**(j - m)`` for ``j = 0..m``: ascending, ending at 1."""
    return np.ldexp(1.0, np.arange(m + 1) - m)


@dataclass(frozen=True)
class DualVandermondeSystem:
    m: int
    rhs: np.ndarray
    nodes: np.ndarray | None = None

    def __post_init__(self):
        if self.m < 0:
            raise VandermondeError("degree must be non-negative")
        if self.m > MAX_DEGREE:
            raise VandermondeError(f"degree {self.m} exceeds the cap of {MAX_DEGREE}")
        nodes = geometric_nodes(self.m) if self.nodes is None else np.asarray(self.nodes, float)
        rhs = np.asarray(self.rhs)
        if nodes.shape != (self.m + 1,) or rhs.shape[0] != self.m + 1:
            raise VandermondeError("need exactly m + 1 nodes and right-hand-side rows")
        if np.any(np.diff(nodes) == 0):
            raise VandermondeError("duplicate nodes")
        if np.any(np.diff(nodes) < 0) or nodes[0] <= 0:
            raise VandermondeError("nodes must be positive and ascending")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "rhs", rhs)


def bp_dual_solve(sys: DualVandermondeSystem) -> np.ndarray:
    """Coefficients ``a`` with ``V^T a = g``; extra trailing axes of ``g`` are solved column-wise."""
    x = sys.nodes
    n = sys.m
    c = np.array(sys.rhs, dtype=complex)
    # Newton divided differences
    for k in range(n):
        for i in range(n, k, -1):
            c[i] = (c[i] - c[i - 1]) / (x[i] - x[i - k - 1])
    # Newton form to monomial form
    for k in range(n - 1, -1, -1):
        for i in range(k, n):
            c[i] = c[i] - x[k] * c[i + 1]
    return c


def solve_dual(g, nodes=None) -> np.ndarray:
    g = np.asarray(g)
    return bp_dual_solve(DualVandermondeSystem(g.shape[0] - 1, g, nodes))
