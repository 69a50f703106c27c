"""Modified Bessel functions and the Marcum-type Pi function."""

from __future__ import annotations

import numpy as np
from scipy import integrate, special

from safepde.config import get_settings
from safepde.core.quadrature import gauss_legendre_unit
from safepde.exceptions import ContractViolation

_NEGATIVE_SLACK = 1e-13


def bessel_I(order: int, x):
    """I_0 or I_1 of a non-negative real argument."""
    if order not in (0, 1):
        raise ContractViolation(f"Bessel order must be 0 or 1, got {order}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ContractViolation("Bessel argument must be non-negative")
    out = special.i0(x) if order == 0 else special.i1(x)
    return float(out) if out.ndim == 0 else out


def _check_pi_args(s1, s2) -> None:
    if np.any(np.asarray(s1) < -_NEGATIVE_SLACK) or np.any(np.asarray(s2) < -_NEGATIVE_SLACK):
        raise ContractViolation(
            "Pi(s1, s2) needs non-negative arguments",
            details={"s1_min": float(np.min(s1)), "s2_min": float(np.min(s2))},
        )


def pi_function(s1: float, s2: float) -> float:
    """Pi(s1, s2) = e^{s1+s2} (1 - s2 e^{-s1} int_0^1 e^{-tau s2} I0(2 sqrt(tau s1 s2)) dtau)."""
    _check_pi_args(s1, s2)
    s1, s2 = max(float(s1), 0.0), max(float(s2), 0.0)
    if s2 == 0.0:
        return float(np.exp(s1))
    integral, _ = integrate.quad(
        lambda tau: np.exp(-tau * s2) * special.i0(2.0 * np.sqrt(tau * s1 * s2)),
        0.0,
        1.0,
        epsabs=1e-12,
        epsrel=1e-12,
        limit=200,
    )
    return float(np.exp(s1 + s2) - s2 * np.exp(s2) * integral)


def pi_function_vec(s1, s2, nodes: int | None = None) -> np.ndarray:
    """Vectorised Pi over broadcast arrays using Gauss-Legendre in tau."""
    _check_pi_args(s1, s2)
    s1 = np.clip(np.asarray(s1, dtype=float), 0.0, None)
    s2 = np.clip(np.asarray(s2, dtype=float), 0.0, None)
    s1, s2 = np.broadcast_arrays(s1, s2)
    tau, weights = gauss_legendre_unit(nodes or get_settings().PI_QUADRATURE_NODES)
    t = tau.reshape((1,) * s1.ndim + (-1,))
    a = s1[..., None]
    b = s2[..., None]
    integrand = np.exp(-t * b) * special.i0(2.0 * np.sqrt(t * a * b))
    integral = integrand @ weights
    return np.exp(s1 + s2) - s2 * np.exp(s2) * integral
