"""Characteristics solver for first-order kernel pairs on the triangle.

Solves

    a K1_x - b K1_y = c1 K2,         K1(x, x) = diag,
    c (K2_x + K2_y) = c2 K1,         K2(x, 0) = r K1(x, 0) + g(x),

on 0 <= y <= x <= 1 by successive approximation of the integral form along
characteristics. Independent of the closed forms, so it serves as their
oracle and as the only source of the kernels of the z-transformation.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import RegularGridInterpolator

from safepde.config import get_settings
from safepde.core.kernels.gains import lambda_gamma
from safepde.core.quadrature import trapezoid_weights
from safepde.exceptions import ContractViolation, KernelOracleError
from safepde.models.plant import PlantParameters
from safepde.utils.logger import get_logger

logger = get_logger(__name__)


def extend_lower_triangle(K: np.ndarray) -> np.ndarray:
    """Fill the first superdiagonal by the parallelogram rule, zero above it.

    Bilinear cells touching the diagonal need one sample across it.
    """
    N = K.shape[0] - 1
    ext = np.tril(np.nan_to_num(K))
    i = np.arange(N)
    ext[i, i + 1] = K[i + 1, i + 1] + K[i, i] - K[i + 1, i]
    return ext


@dataclass(frozen=True)
class KernelPairTable:
    """Sampled pair on a square grid; only entries with j <= i are meaningful."""

    x: np.ndarray
    K1: np.ndarray
    K2: np.ndarray
    sweeps: int
    residual: float

    def interpolator(self, which: str) -> RegularGridInterpolator:
        table = self.K1 if which == "K1" else self.K2
        return RegularGridInterpolator((self.x, self.x), extend_lower_triangle(table), method="linear")

    def sample(self, which: str, x, y) -> np.ndarray:
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        pts = np.stack([np.clip(x, 0.0, 1.0), np.clip(y, 0.0, 1.0)], axis=-1)
        return self.interpolator(which)(pts)

    def dump(self, directory: str | Path, prefix: str = "kernel") -> list[Path]:
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        paths = []
        for name, table in (("K1", self.K1), ("K2", self.K2)):
            path = out / f"{prefix}_{name}.txt"
            np.savetxt(path, np.tril(table), fmt="%.17g")
            paths.append(path)
        return paths


def solve_kernel_pair(
    a: float,
    b: float,
    c1: float,
    diag: float,
    c: float,
    c2: float,
    r: float,
    g: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    resolution: Optional[int] = None,
    tol: Optional[float] = None,
    max_sweeps: Optional[int] = None,
) -> KernelPairTable:
    settings = get_settings()
    N = int(resolution or settings.ORACLE_RESOLUTION)
    tol = settings.ORACLE_TOLERANCE if tol is None else tol
    max_sweeps = max_sweeps or settings.ORACLE_MAX_SWEEPS
    if a <= 0 or b <= 0 or c <= 0:
        raise ContractViolation("characteristic speeds a, b, c must be positive")

    h = 1.0 / N
    xs = np.linspace(0.0, 1.0, N + 1)
    I, J = np.tril_indices(N + 1)
    x, y = xs[I], xs[J]

    # characteristic of K1 through (x, y), started on the diagonal
    Q = max(9, N // 4 + 1)
    u = np.linspace(0.0, 1.0, Q)
    sigma = (x - y) / (a + b)
    s0 = (b * x + a * y) / (a + b)
    char_x = s0[:, None] + a * sigma[:, None] * u[None, :]
    char_y = s0[:, None] - b * sigma[:, None] * u[None, :]
    char_pts = np.stack([np.clip(char_x, 0.0, 1.0), np.clip(char_y, 0.0, 1.0)], axis=-1)
    char_w = sigma[:, None] * trapezoid_weights(Q, 1.0 / (Q - 1))[None, :]

    g_vals = np.zeros(N + 1) if g is None else np.asarray(g(xs), dtype=float)
    diag_idx = [(d + np.arange(N + 1 - d), np.arange(N + 1 - d)) for d in range(N + 1)]

    K1 = np.zeros((N + 1, N + 1))
    K2 = np.zeros((N + 1, N + 1))
    K1[I, J] = diag

    residual = np.inf
    for sweep in range(1, max_sweeps + 1):
        interp = RegularGridInterpolator((xs, xs), extend_lower_triangle(K2), method="linear")
        K1_new = np.zeros_like(K1)
        K1_new[I, J] = diag + c1 * np.sum(char_w * interp(char_pts), axis=1)

        K2_new = np.zeros_like(K2)
        for d, (rows, cols) in enumerate(diag_idx):
            along = cumulative_trapezoid(K1_new[rows, cols], dx=h, initial=0.0)
            K2_new[rows, cols] = r * K1_new[d, 0] + g_vals[d] + (c2 / c) * along

        scale = max(1.0, float(np.max(np.abs(K1_new))), float(np.max(np.abs(K2_new))))
        residual = max(np.max(np.abs(K1_new - K1)), np.max(np.abs(K2_new - K2))) / scale
        K1, K2 = K1_new, K2_new
        if residual < tol:
            logger.debug("kernel_oracle_converged", sweeps=sweep, residual=residual, resolution=N)
            return KernelPairTable(x=xs, K1=K1, K2=K2, sweeps=sweep, residual=float(residual))

    raise KernelOracleError(max_sweeps, float(residual))


def _d_pair(params: PlantParameters, theta) -> tuple[float, float, float]:
    if theta is None:
        return params.d1, params.d2, params.b
    b = float(theta[2]) if len(theta) > 2 else params.b
    return float(theta[0]), float(theta[1]), b


def kernel_pde_oracle(params: PlantParameters, theta=None, resolution: Optional[int] = None) -> KernelPairTable:
    """F (as K1) and H (as K2) from their kernel PDEs."""
    d1, d2, _ = _d_pair(params, theta)
    q1, q2 = params.q1, params.q2
    return solve_kernel_pair(
        a=q2, b=q1, c1=d2, diag=-d2 / (q1 + q2),
        c=q2, c2=d1, r=q1 * params.p / q2,
        resolution=resolution,
    )


def psi_phi_oracle(
    params: PlantParameters, theta, K: np.ndarray, resolution: Optional[int] = None
) -> KernelPairTable:
    """Psi (as K1) and Phi (as K2) on the full triangle."""
    d1, d2, b = _d_pair(params, theta)
    q1, q2 = params.q1, params.q2
    return solve_kernel_pair(
        a=q2, b=q1, c1=d2, diag=-d2 / (q1 + q2),
        c=q2, c2=d1, r=q1 * params.p / q2,
        g=lambda xs: lambda_gamma(xs, params, K)[0][:, -1] * b / q2,
        resolution=resolution,
    )


def alpha_kernel_oracle(
    params: PlantParameters, theta, K: np.ndarray, resolution: Optional[int] = None
) -> KernelPairTable:
    """Kernels of the z-transformation: varphi (paired with w) as K1, phi (paired with z) as K2."""
    if params.p == 0.0:
        raise ContractViolation("the z-transformation kernels need p != 0")
    d1, d2, b = _d_pair(params, theta)
    q1, q2, p = params.q1, params.q2, params.p
    return solve_kernel_pair(
        a=q1, b=q2, c1=-d1, diag=d1 / (q1 + q2),
        c=q1, c2=-d2, r=q2 / (q1 * p),
        g=lambda xs: -lambda_gamma(xs, params, K)[1][:, -1] * b / (q1 * p),
        resolution=resolution,
    )
