"""Distal-chain gains: g-chain coefficients, K, A_Z, T_Z, and lambda/gamma."""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy import linalg

from safepde.models.plant import PlantParameters


def g_chain_rows(kappas: Sequence[float], n: int) -> np.ndarray:
    """Coefficient rows G_0..G_{n-1} of g_i = G_i . Y.

    g_0 = 0 and g_i = -kappa_i z_i + sum_{j<i} (dg_{i-1}/dy_j) y_{j+1} with
    z_i = y_i - g_{i-1}.
    """
    G = np.zeros((n, n))
    for i in range(1, n):
        prev = G[i - 1]
        e = np.zeros(n)
        e[i - 1] = 1.0
        shifted = np.zeros(n)
        shifted[1:] = prev[:-1]
        G[i] = -kappas[i - 1] * (e - prev) + shifted
    return G


def gain_vector_K(params: PlantParameters, kappas: Sequence[float], b: float | None = None) -> np.ndarray:
    """Row vector K placing the target ODE matrix A_Z; ``b`` defaults to params.b."""
    n = params.n
    b = params.b if b is None else float(b)
    G = g_chain_rows(kappas, n)
    last = G[n - 1]
    kappa_n = kappas[n - 1]
    bK = -params.l + kappa_n * last
    bK[1:] += last[:-1]
    bK[-1] -= kappa_n
    return bK / b


def target_matrix(kappas: Sequence[float]) -> np.ndarray:
    """Bidiagonal A_Z with -kappa_i on the diagonal and ones above it."""
    n = len(kappas)
    return np.diag(-np.asarray(kappas, dtype=float)) + np.diag(np.ones(n - 1), 1)


def target_transform(kappas: Sequence[float]) -> np.ndarray:
    """T_Z with Z = T_Z Y (row i is e_i - G_{i-1})."""
    n = len(kappas)
    return np.eye(n) - g_chain_rows(kappas, n)


def lambda_gamma(x, params: PlantParameters, K: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """lambda(x) = K e^{A x/q2} and gamma(x) = p K e^{-A x/q1}, shape (..., n)."""
    x = np.asarray(x, dtype=float)
    A = params.A
    E_lam = linalg.expm(x[..., None, None] * A / params.q2)
    E_gam = linalg.expm(-x[..., None, None] * A / params.q1)
    lam = np.einsum("j,...jk->...k", K, E_lam)
    gam = params.p * np.einsum("j,...jk->...k", K, E_gam)
    return lam, gam
