"""Dense numeric kernels: square solve, minimum-norm least squares, singular values.

Matrices are plain 2-D complex numpy arrays.  Invertibility is decided by
the relative spectral test sigma_min > tau_rel * max(sigma_max, 1), the
standard numeric proxy for exact invertibility.
"""

from __future__ import annotations

import numpy as np

from .errors import SingularMatrixError

TAU_REL_DEFAULT = 1e-10
NORM_CAP_DEFAULT = 1e6

__all__ = [
    "TAU_REL_DEFAULT",
    "NORM_CAP_DEFAULT",
    "as_matrix",
    "singular_values",
    "spectral_norm",
    "min_singular_value",
    "is_invertible",
    "solve_square",
    "least_squares",
]


def as_matrix(data) -> np.ndarray:
    m = np.asarray(data, dtype=complex)
    if m.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    return m


def singular_values(matrix) -> np.ndarray:
    """All singular values in descending order (empty for degenerate shapes)."""
    m = as_matrix(matrix)
    if m.size == 0:
        return np.zeros(0)
    return np.linalg.svd(m, compute_uv=False)


def spectral_norm(matrix) -> float:
    """Largest singular value; 0 for matrices with an empty axis."""
    sv = singular_values(matrix)
    return float(sv[0]) if sv.size else 0.0


def min_singular_value(matrix) -> float:
    m = as_matrix(matrix)
    if m.shape[0] != m.shape[1]:
        raise ValueError("smallest singular value is defined for square matrices here")
    if m.size == 0:
        raise ValueError("empty matrix")
    return float(singular_values(m)[-1])


def is_invertible(matrix, tau_rel: float = TAU_REL_DEFAULT) -> bool:
    sv = singular_values(matrix)
    return bool(sv.size) and float(sv[-1]) > tau_rel * max(float(sv[0]), 1.0)


def solve_square(matrix, rhs, tau_rel: float = TAU_REL_DEFAULT) -> np.ndarray:
    """Backward-stable solve of a square system after the invertibility test."""
    m = as_matrix(matrix)
    b = np.asarray(rhs, dtype=complex)
    if m.shape[0] != m.shape[1]:
        raise ValueError("matrix is not square")
    if b.shape[0] != m.shape[0]:
        raise ValueError("right-hand side length mismatch")
    if not is_invertible(m, tau_rel):
        raise SingularMatrixError(
            f"matrix of shape {m.shape} fails the invertibility test (tau={tau_rel:g})"
        )
    return np.linalg.solve(m, b)


def least_squares(matrix, rhs, rank_tol: float = TAU_REL_DEFAULT) -> np.ndarray:
    """Minimum-norm minimizer of ||M x - rhs||_2 (pseudo-inverse solution)."""
    m = as_matrix(matrix)
    b = np.asarray(rhs, dtype=complex)
    if b.shape[0] != m.shape[0]:
        raise ValueError("right-hand side length mismatch")
    if m.shape[1] == 0:
        return np.zeros(0, dtype=complex)
    if m.shape[0] == 0:
        return np.zeros(m.shape[1], dtype=complex)
    x, *_ = np.linalg.lstsq(m, b, rcond=rank_tol)
    return x
