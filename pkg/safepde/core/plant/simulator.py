"""One explicit time step of the ODE-PDE-ODE plant.

Transport: first-order upwind (backward differences for z moving right,
forward differences for w moving left), couplings explicit. ODEs: classical
RK4 with w(0) and the z(1) derivatives frozen over the step.
"""

from __future__ import annotations

import numpy as np

from safepde.core.plant.boundary import boundary_time_derivatives
from safepde.core.plant.state import PlantState
from safepde.exceptions import NumericFault
from safepde.models.plant import PlantParameters, SimGrid


def ode_rhs(
    X: np.ndarray,
    Y: np.ndarray,
    U: float,
    w0: float,
    z1_derivs: np.ndarray,
    params: PlantParameters,
) -> tuple[np.ndarray, np.ndarray]:
    """Right-hand sides of the actuator chain X and the companion ODE Y."""
    f = params.nonlinearity.evaluate(X)
    dX = np.empty_like(X)
    dX[:-1] = X[1:] + f[:-1]
    dX[-1] = f[-1] + params.qbar @ z1_derivs + params.M @ Y + U
    dY = params.A @ Y + params.B * w0
    return dX, dY


def rk4_ode(
    X: np.ndarray,
    Y: np.ndarray,
    U: float,
    w0: float,
    z1_derivs: np.ndarray,
    params: PlantParameters,
    dt: float,
) -> tuple[np.ndarray, np.ndarray]:
    k1x, k1y = ode_rhs(X, Y, U, w0, z1_derivs, params)
    k2x, k2y = ode_rhs(X + 0.5 * dt * k1x, Y + 0.5 * dt * k1y, U, w0, z1_derivs, params)
    k3x, k3y = ode_rhs(X + 0.5 * dt * k2x, Y + 0.5 * dt * k2y, U, w0, z1_derivs, params)
    k4x, k4y = ode_rhs(X + dt * k3x, Y + dt * k3y, U, w0, z1_derivs, params)
    X_new = X + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    Y_new = Y + dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
    return X_new, Y_new


def transport_rhs(
    z: np.ndarray, w: np.ndarray, d1: float, d2: float, q1: float, q2: float, dx: float
) -> tuple[np.ndarray, np.ndarray]:
    """Upwind semi-discrete rates of z and w.

    z_t is set on x_1..x_N and w_t on x_0..x_{N-1}; the boundary samples
    z(0) and w(1) follow from the boundary conditions and are left at 0.
    """
    z_t = np.zeros_like(z)
    w_t = np.zeros_like(w)
    z_t[1:] = -q1 / dx * (z[1:] - z[:-1]) + d1 * w[1:]
    w_t[:-1] = q2 / dx * (w[1:] - w[:-1]) + d2 * z[:-1]
    return z_t, w_t


def step(state: PlantState, U: float, params: PlantParameters, grid: SimGrid) -> PlantState:
    """Advance the plant by ``grid.dt`` under input ``U``."""
    dt = grid.dt
    z, w = state.z, state.w
    z_t, w_t = transport_rhs(z, w, params.d1, params.d2, params.q1, params.q2, grid.dx)
    z_new = z + dt * z_t
    w_new = w + dt * w_t

    z1 = boundary_time_derivatives(state, params.theta, params.m - 1, params).z1
    X_new, Y_new = rk4_ode(state.X, state.Y, float(U), float(w[0]), z1, params, dt)

    w_new[-1] = X_new[0]
    z_new[0] = params.p * w_new[0]

    new = PlantState(
        t=state.t + dt,
        z=z_new,
        w=w_new,
        X=X_new,
        Y=Y_new,
        step_index=state.step_index + 1,
    )
    if not new.is_finite():
        raise NumericFault(
            f"non-finite plant state after step {new.step_index}",
            step_index=new.step_index,
            term="state",
        )
    return new
