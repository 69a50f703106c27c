"""Controller kernel rows Psi(1, y), Phi(1, y) and their y-derivatives."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from safepde.config import Settings, get_settings
from safepde.core.kernels.explicit import kernel_FH
from safepde.core.kernels.gains import lambda_gamma
from safepde.core.quadrature import fd_derivative, gauss_legendre_unit
from safepde.models.plant import PlantParameters
from safepde.utils.logger import get_logger

logger = get_logger(__name__)

_DERIVATIVE_WARN_LEVEL = 1e-4


@dataclass(frozen=True)
class KernelRow:
    y: np.ndarray
    psi: np.ndarray
    phi: np.ndarray
    psi_dy: np.ndarray
    psi_dyy: np.ndarray
    phi_dy: np.ndarray
    phi_dyy: np.ndarray


def _lambda_b_spline(params: PlantParameters, K: np.ndarray, b: float, samples: int = 4001) -> CubicSpline:
    s = np.linspace(0.0, 1.0, samples)
    lam, _ = lambda_gamma(s, params, K)
    return CubicSpline(s, lam[:, -1] * b)


def _derivative_error(values: np.ndarray, h: float, order: int) -> float:
    """Richardson-style estimate: compare h and 2h stencils on shared nodes."""
    fine = fd_derivative(values, h, order)[::2]
    coarse = fd_derivative(values[::2], 2.0 * h, order)
    scale = max(1.0, float(np.max(np.abs(fine))))
    return float(np.max(np.abs(fine - coarse))) / 15.0 / scale


def psi_phi_row(
    params: PlantParameters,
    theta,
    K: np.ndarray,
    y_grid: np.ndarray,
    settings: Optional[Settings] = None,
) -> KernelRow:
    """Psi(1, .) and Phi(1, .) with first and second y-derivatives on ``y_grid``.

    Psi(1,y) = F(1,y) + int_y^1 L(1,r) F(r,y) dr and
    Phi(1,y) = H(1,y) - L(1,y) + int_y^1 L(1,r) H(r,y) dr with
    L(1,r) = -lambda(1-r) B/q2. Values are computed on a refined uniform grid,
    differentiated there with fourth-order stencils and splined onto y_grid.
    """
    settings = settings or get_settings()
    d1, d2, b = (float(v) for v in theta)
    q2 = params.q2
    n_fine = settings.KERNEL_RESOLUTION * settings.KERNEL_REFINEMENT
    yf = np.linspace(0.0, 1.0, n_fine + 1)
    h = 1.0 / n_fine

    lam_b = _lambda_b_spline(params, K, b)
    tau, weights = gauss_legendre_unit(settings.VOLTERRA_QUADRATURE_NODES)
    span = 1.0 - yf
    r = yf[:, None] + span[:, None] * tau[None, :]
    W = span[:, None] * weights[None, :]

    L_r = -lam_b(1.0 - r) / q2
    F_r, H_r = kernel_FH(r, np.broadcast_to(yf[:, None], r.shape), params, (d1, d2),
                         nodes=settings.PI_QUADRATURE_NODES)
    F_1, H_1 = kernel_FH(np.ones_like(yf), yf, params, (d1, d2), nodes=settings.PI_QUADRATURE_NODES)
    L_1 = -lam_b(1.0 - yf) / q2

    psi = F_1 + np.sum(W * L_r * F_r, axis=1)
    phi = H_1 - L_1 + np.sum(W * L_r * H_r, axis=1)

    derivs = {
        "psi_dy": fd_derivative(psi, h, 1),
        "psi_dyy": fd_derivative(psi, h, 2),
        "phi_dy": fd_derivative(phi, h, 1),
        "phi_dyy": fd_derivative(phi, h, 2),
    }
    worst = max(
        _derivative_error(psi, h, 2),
        _derivative_error(phi, h, 2),
    )
    if worst > _DERIVATIVE_WARN_LEVEL:
        logger.warning(
            "kernel_derivative_resolution",
            estimated_error=worst,
            kernel_resolution=settings.KERNEL_RESOLUTION,
            refinement=settings.KERNEL_REFINEMENT,
        )

    y_grid = np.asarray(y_grid, dtype=float)
    if y_grid.size == yf.size and np.allclose(y_grid, yf, rtol=0.0, atol=1e-15):
        return KernelRow(y=y_grid, psi=psi, phi=phi, **derivs)

    def onto(values: np.ndarray) -> np.ndarray:
        return CubicSpline(yf, values)(y_grid)

    return KernelRow(
        y=y_grid,
        psi=onto(psi),
        phi=onto(phi),
        **{name: onto(values) for name, values in derivs.items()},
    )
