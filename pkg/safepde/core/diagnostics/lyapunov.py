"""Lyapunov function of the target system and its guaranteed decay rate."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import linalg

from safepde.core.diagnostics.target import TargetState
from safepde.core.kernels.gains import target_matrix
from safepde.core.quadrature import trapezoid_weights
from safepde.exceptions import NonHurwitzError, NumericFault
from safepde.models.plant import GainConfig, PlantParameters

_RESIDUAL_TOL = 1e-10
_ANALYSIS_MARGIN = 1.01


@dataclass(frozen=True)
class LyapunovConfig:
    Q: np.ndarray
    P: np.ndarray
    a0: float
    r: float
    sigma0: float
    xi1: float
    xi2: float
    residual: float


def solve_lyapunov(A: np.ndarray, Q: np.ndarray) -> tuple[np.ndarray, float]:
    """P with A^T P + P A = -Q via the vectorised (Kronecker) linear system."""
    n = A.shape[0]
    I = np.eye(n)
    lhs = np.kron(I, A.T) + np.kron(A.T, I)
    vecP = linalg.solve(lhs, -Q.reshape(-1, order="F"))
    P = vecP.reshape((n, n), order="F")
    P = 0.5 * (P + P.T)
    residual = float(np.max(np.abs(A.T @ P + P @ A + Q)))
    return P, residual


def lyapunov_rate(
    params: PlantParameters,
    gains: GainConfig,
    Q: Optional[np.ndarray] = None,
    b: Optional[float] = None,
) -> LyapunovConfig:
    """P, a0, r and sigma0 with a0, r 1% above their lower bounds.

    ``b`` sets |PB|; adaptive runs pass the box upper bound.
    """
    kappas: Sequence[float] = gains.kappas
    if any(k <= 0 for k in kappas):
        raise NonHurwitzError(kappas)
    n = params.n
    Q = np.eye(n) if Q is None else np.atleast_2d(np.asarray(Q, dtype=float))
    A_Z = target_matrix(kappas)
    P, residual = solve_lyapunov(A_Z, Q)
    if residual > _RESIDUAL_TOL * max(1.0, float(np.max(np.abs(Q)))):
        raise NumericFault(f"Lyapunov equation residual {residual:.3e} too large", term="P")

    B = np.zeros(n)
    B[-1] = params.b if b is None else float(b)
    lam_Q = float(np.min(linalg.eigvalsh(Q)))
    eig_P = linalg.eigvalsh(P)
    q1, q2, e = params.q1, params.q2, np.e
    PB = P @ B

    a0 = _ANALYSIS_MARGIN * (q1 * params.p**2 / q2 + 4.0 * float(PB @ PB) / (q2 * lam_Q))
    a0 = max(a0, 1e-12)
    r = _ANALYSIS_MARGIN * (q2 * a0 * e / 3.0 + 1.0)

    xi1 = min(float(eig_P[0]), r / 2.0, 0.5 / e, a0 / 2.0)
    xi2 = max(float(eig_P[-1]), r / 2.0, 0.5, a0 * e / 2.0)
    sigma0 = min(1.0, lam_Q / 2.0, q1 / (2.0 * e), q2 * a0 / 2.0) / xi2
    return LyapunovConfig(Q=Q, P=P, a0=a0, r=r, sigma0=sigma0, xi1=xi1, xi2=xi2, residual=residual)


def _weights(size: int) -> np.ndarray:
    return trapezoid_weights(size, 1.0 / (size - 1))


def lyapunov_V(target: TargetState, config: LyapunovConfig) -> float:
    beta = target.beta
    x = np.linspace(0.0, 1.0, beta.size)
    W = _weights(beta.size)
    V = float(target.Z @ config.P @ target.Z) + 0.5 * config.r * float(target.h @ target.h)
    V += 0.5 * config.a0 * float(W @ (np.exp(x) * beta**2))
    if target.alpha is not None:
        V += 0.5 * float(W @ (np.exp(-x) * target.alpha**2))
    return V


def xi_norm(target: TargetState) -> float:
    """||beta||^2 + ||alpha||^2 + |h|^2 + |Z|^2."""
    W = _weights(target.beta.size)
    out = float(W @ target.beta**2) + float(target.h @ target.h) + float(target.Z @ target.Z)
    if target.alpha is not None:
        out += float(W @ target.alpha**2)
    return out
