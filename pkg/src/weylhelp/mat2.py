"""Closed-form helpers for 2x2 complex matrices.

All functions broadcast over leading axes, so a batch of matrices is an
array of shape ``(..., 2, 2)``.
"""

import numpy as np

I2 = np.eye(2, dtype=complex)


def adj(b):
    """Adjugate: ``b @ adj(b) == det(b) * I``."""
    b = np.asarray(b)
    out = np.empty_like(b)
    out[..., 0, 0] = b[..., 1, 1]
    out[..., 0, 1] = -b[..., 0, 1]
    out[..., 1, 0] = -b[..., 1, 0]
    out[..., 1, 1] = b[..., 0, 0]
    return out


def det(b):
    b = np.asarray(b)
    return b[..., 0, 0] * b[..., 1, 1] - b[..., 0, 1] * b[..., 1, 0]


def trace(b):
    b = np.asarray(b)
    return b[..., 0, 0] + b[..., 1, 1]


def tr_adj_prod(a, b):
    """``trace(adj(a) @ b)`` without forming either product."""
    a = np.asarray(a)
    b = np.asarray(b)
    return (a[..., 1, 1] * b[..., 0, 0] - a[..., 0, 1] * b[..., 1, 0]
            - a[..., 1, 0] * b[..., 0, 1] + a[..., 0, 0] * b[..., 1, 1])


def inv(b):
    return adj(b) / det(b)[..., None, None]


def sup(b) -> float:
    """Max modulus over all entries (the sup norm used for error reports)."""
    b = np.asarray(b)
    return float(np.max(np.abs(b))) if b.size else 0.0
