"""Controller context for one parameter triple.

Holds the R_i, P_i tables, lambda(1) A^i and the coefficient tables the law
evaluates Gamma^{(i)} with. Gamma^{(i)} is a linear functional of
(z, w, x1, Y) plus, for i = 2, a multiple of dx1/dt.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from safepde.core.kernels.context import KernelContext, KernelRowCache, build_kernel_context
from safepde.core.kernels.rows import KernelRow
from safepde.core.quadrature import fd_derivative, upwind_weights
from safepde.exceptions import ContractViolation
from safepde.models.plant import GainConfig, PlantParameters, SimGrid, Theta


@dataclass(frozen=True)
class ControllerContext:
    kernel: KernelContext
    R_tab: np.ndarray  # (m+1, Nx+1)
    P_tab: np.ndarray
    lambdaA: np.ndarray  # (m+1, n), row i = lambda(1) A^i
    lambdaAB: np.ndarray  # (m+1,), lambda(1) A^i B
    z_coef: np.ndarray  # (m+1, Nx+1), zero at x = 0
    w_coef: np.ndarray  # (m+1, Nx+1), zero at x = 1
    x1_coef: np.ndarray  # (m+1,)
    gains: GainConfig

    @property
    def theta(self) -> Theta:
        return self.kernel.theta


def rp_tables_closed_form(row: KernelRow, params: PlantParameters, theta, m: int) -> tuple[np.ndarray, np.ndarray]:
    """R_0..R_m and P_0..P_m from Psi, Phi and their y-derivatives (m <= 2)."""
    if m > 2:
        raise ContractViolation("closed-form R/P tables cover m <= 2")
    d1, d2 = float(theta[0]), float(theta[1])
    q1, q2 = params.q1, params.q2
    R = [row.psi]
    P = [row.phi]
    if m >= 1:
        R.append(q1 * row.psi_dy + d2 * row.phi)
        P.append(-q2 * row.phi_dy + d1 * row.psi)
    if m >= 2:
        R.append(q1**2 * row.psi_dyy + d2 * (q1 - q2) * row.phi_dy + d1 * d2 * row.psi)
        P.append(q2**2 * row.phi_dyy + d1 * (q1 - q2) * row.psi_dy + d1 * d2 * row.phi)
    return np.array(R), np.array(P)


def rp_tables_by_recursion(row: KernelRow, params: PlantParameters, theta, m: int) -> tuple[np.ndarray, np.ndarray]:
    """R_i = q1 R'_{i-1} + d2 P_{i-1}, P_i = -q2 P'_{i-1} + d1 R_{i-1} on a uniform row grid."""
    d1, d2 = float(theta[0]), float(theta[1])
    h = float(row.y[1] - row.y[0])
    R, P = [row.psi], [row.phi]
    for _ in range(m):
        R_prev, P_prev = R[-1], P[-1]
        R.append(params.q1 * fd_derivative(R_prev, h, 1) + d2 * P_prev)
        P.append(-params.q2 * fd_derivative(P_prev, h, 1) + d1 * R_prev)
    return np.array(R), np.array(P)


def gamma_coefficients(
    psi: np.ndarray,
    phi: np.ndarray,
    lambdaAB: np.ndarray,
    params: PlantParameters,
    theta,
    m: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Coefficients of Gamma^{(0..m)} on the sampled state.

    Row 0 is the upwind-matched quadrature of Psi(1,.) z + Phi(1,.) w. Row
    i+1 is the time derivative of row i under the upwind semi-discretisation
    with z(0) = p w(0) and w(1) = x1 substituted, so the discrete Gamma is
    differentiated exactly. Invariant: z_coef[:, 0] = w_coef[:, -1] = 0.
    """
    d1, d2 = float(theta[0]), float(theta[1])
    q1, q2, p = params.q1, params.q2, params.p
    size = psi.size
    dx = 1.0 / (size - 1)
    wz, ww = upwind_weights(size, dx)
    a, c, e = wz * psi, ww * phi, 0.0
    zc, wc, xc = [a], [c], [e]
    for i in range(m):
        a_next = np.zeros(size)
        c_next = np.zeros(size)
        a_next[1:] = q1 / dx * (np.append(a[2:], 0.0) - a[1:]) + d2 * c[1:]
        c_next[:-1] = q2 / dx * (np.concatenate([[0.0], c[:-2]]) - c[:-1]) + d1 * a[:-1]
        c_next[0] += p * (q1 / dx * a[1] + d2 * c[0]) + lambdaAB[i]
        e = d1 * a[-1] + q2 / dx * c[-2]
        a, c = a_next, c_next
        zc.append(a)
        wc.append(c)
        xc.append(e)
    return np.array(zc), np.array(wc), np.array(xc)


def build_context(
    params: PlantParameters,
    theta,
    gains: GainConfig,
    grid: SimGrid,
    cache: Optional[KernelRowCache] = None,
) -> ControllerContext:
    """Context for ``theta`` (true triple in nominal mode, a candidate otherwise)."""
    theta = Theta.from_array(theta)
    kernel = build_kernel_context(params, theta, gains.kappas, grid.x, cache=cache)
    m = params.m
    R, P = rp_tables_closed_form(kernel.row, params, theta, m)

    A = params.A
    B = np.zeros(params.n)
    B[-1] = theta.b
    lam = [kernel.lambda_one]
    for _ in range(m):
        lam.append(lam[-1] @ A)
    lambdaA = np.array(lam)
    lambdaAB = lambdaA @ B
    z_coef, w_coef, x1_coef = gamma_coefficients(kernel.psi1, kernel.phi1, lambdaAB, params, theta, m)
    return ControllerContext(
        kernel=kernel,
        R_tab=R,
        P_tab=P,
        lambdaA=lambdaA,
        lambdaAB=lambdaAB,
        z_coef=z_coef,
        w_coef=w_coef,
        x1_coef=x1_coef,
        gains=gains,
    )
