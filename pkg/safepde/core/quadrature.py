"""
Quadrature weights and finite-difference stencils shared by the solver,
kernels, identifier and diagnostics.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss


def trapezoid_weights(n_points: int, dx: float) -> np.ndarray:
    """Composite trapezoid weights for ``n_points`` uniform samples."""
    w = np.full(n_points, dx)
    w[0] = w[-1] = 0.5 * dx
    return w


def upwind_weights(n_points: int, dx: float) -> tuple[np.ndarray, np.ndarray]:
    """Endpoint rules matched to the upwind transport stencils.

    z (moving right) is summed over x_1..x_N, w (moving left) over
    x_0..x_{N-1}, so z(0) and w(1) never enter the sum directly.
    """
    wz = np.full(n_points, dx)
    ww = np.full(n_points, dx)
    wz[0] = 0.0
    ww[-1] = 0.0
    return wz, ww


def lower_triangular_trapezoid(n_points: int, dx: float) -> np.ndarray:
    """Row i holds trapezoid weights for the integral over [x_0, x_i].

    Row 0 is zero (empty interval).
    """
    W = np.tril(np.full((n_points, n_points), dx))
    idx = np.arange(n_points)
    W[:, 0] = 0.5 * dx
    W[idx, idx] = 0.5 * dx
    W[0, 0] = 0.0
    return W


@lru_cache(maxsize=16)
def _leggauss_unit(n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = leggauss(n_nodes)
    return 0.5 * (nodes + 1.0), 0.5 * weights


def gauss_legendre_unit(n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    nodes, weights = _leggauss_unit(int(n_nodes))
    return nodes.copy(), weights.copy()


# ---------------------------------------------------------------------------
# Fourth-order finite differences on a uniform grid
# ---------------------------------------------------------------------------

_D1_LEFT = (
    np.array([-25.0, 48.0, -36.0, 16.0, -3.0]),
    np.array([-3.0, -10.0, 18.0, -6.0, 1.0]),
)
_D2_LEFT = (
    np.array([45.0, -154.0, 214.0, -156.0, 61.0, -10.0]),
    np.array([10.0, -15.0, -4.0, 14.0, -6.0, 1.0]),
)


def fd_derivative(values: np.ndarray, h: float, order: int = 1) -> np.ndarray:
    """Fourth-order accurate first or second derivative along the last axis.

    Centered five-point stencils in the interior, one-sided stencils on the
    two outermost samples at each end. Needs at least 6 samples.
    """
    f = np.asarray(values, dtype=float)
    if f.shape[-1] < 6:
        raise ValueError("fd_derivative needs at least 6 samples")
    out = np.empty_like(f)
    if order == 1:
        out[..., 2:-2] = (
            -f[..., 4:] + 8.0 * f[..., 3:-1] - 8.0 * f[..., 1:-3] + f[..., :-4]
        ) / (12.0 * h)
        for k, stencil in enumerate(_D1_LEFT):
            out[..., k] = f[..., :5] @ stencil / (12.0 * h)
            out[..., -1 - k] = -(f[..., ::-1][..., :5] @ stencil) / (12.0 * h)
    elif order == 2:
        out[..., 2:-2] = (
            -f[..., 4:] + 16.0 * f[..., 3:-1] - 30.0 * f[..., 2:-2]
            + 16.0 * f[..., 1:-3] - f[..., :-4]
        ) / (12.0 * h * h)
        for k, stencil in enumerate(_D2_LEFT):
            out[..., k] = f[..., :6] @ stencil / (12.0 * h * h)
            out[..., -1 - k] = f[..., ::-1][..., :6] @ stencil / (12.0 * h * h)
    else:
        raise ValueError("fd_derivative supports order 1 or 2")
    return out
