"""Distal ODE response before the control reaches it (t <= 1/q2).

Y(t) = e^{At} [Y(0) + int_0^t e^{-As} B eta0(q2 s) ds] with
eta0(x) = w0(x) - int_0^x F(x,y) z0(y) dy - int_0^x H(x,y) w0(y) dy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg
from scipy.integrate import cumulative_trapezoid

from safepde.config import get_settings
from safepde.core.kernels.explicit import kernel_FH
from safepde.core.plant.state import PlantState
from safepde.core.quadrature import lower_triangular_trapezoid
from safepde.exceptions import ContractViolation
from safepde.models.plant import PlantParameters


@dataclass(frozen=True)
class FreeResponse:
    """Y on the time nodes ``t``; Y = free + b * forced_per_b for any b."""

    t: np.ndarray
    Y: np.ndarray
    free: np.ndarray
    forced_per_b: np.ndarray
    eta0: np.ndarray

    def at_end(self, b: Optional[float] = None) -> np.ndarray:
        if b is None:
            return self.Y[-1]
        return self.free[-1] + b * self.forced_per_b[-1]


def inflow_profile(state0: PlantState, params: PlantParameters, theta, xs: np.ndarray) -> np.ndarray:
    """eta0 on the uniform nodes ``xs`` by trapezoid quadrature of the F/H integrals."""
    x_state = np.linspace(0.0, 1.0, state0.z.size)
    z0 = np.interp(xs, x_state, state0.z)
    w0 = np.interp(xs, x_state, state0.w)
    I, J = np.tril_indices(xs.size)
    F, H = kernel_FH(xs[I], xs[J], params, theta)
    F_tab = np.zeros((xs.size, xs.size))
    H_tab = np.zeros_like(F_tab)
    F_tab[I, J] = F
    H_tab[I, J] = H
    W = lower_triangular_trapezoid(xs.size, xs[1] - xs[0])
    return w0 - (W * F_tab) @ z0 - (W * H_tab) @ w0


def predict_Y_free(
    state0: PlantState,
    params: PlantParameters,
    horizon: Optional[float] = None,
    resolution: Optional[int] = None,
    theta=None,
) -> FreeResponse:
    """Y over [0, horizon] with horizon <= 1/q2 (defaults to 1/q2)."""
    q2 = params.q2
    horizon = 1.0 / q2 if horizon is None else float(horizon)
    if horizon <= 0 or horizon > 1.0 / q2 * (1.0 + 1e-12):
        raise ContractViolation("free response horizon must lie in (0, 1/q2]", details={"horizon": horizon})
    theta = params.theta if theta is None else theta

    N = resolution or min(state0.Nx, get_settings().KERNEL_RESOLUTION)
    xs = np.linspace(0.0, 1.0, N + 1)
    eta0 = inflow_profile(state0, params, theta, xs)

    steps = max(1, int(np.ceil(horizon * q2 * N - 1e-9)))
    t = np.linspace(0.0, horizon, steps + 1)
    eta_t = np.interp(q2 * t, xs, eta0)

    A = params.A
    E_pos = linalg.expm(t[:, None, None] * A)
    E_neg = linalg.expm(-t[:, None, None] * A)
    e_n = np.zeros(params.n)
    e_n[-1] = 1.0
    integrand = (E_neg @ e_n) * eta_t[:, None]
    forced_inner = cumulative_trapezoid(integrand, t, axis=0, initial=0.0)

    free = E_pos @ state0.Y
    forced_per_b = np.einsum("kij,kj->ki", E_pos, forced_inner)
    b = float(theta[2]) if len(theta) > 2 else params.b
    return FreeResponse(
        t=t,
        Y=free + b * forced_per_b,
        free=free,
        forced_per_b=forced_per_b,
        eta0=eta0,
    )
