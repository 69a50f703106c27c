"""Boundary time derivatives by substituting the transport PDEs.

z_t = -q1 z_x + d1 w and w_t = q2 w_x + d2 z are applied recursively to the
sampled profiles; spatial derivatives use second-order one-sided stencils at
the boundaries (numpy.gradient, edge_order=2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from safepde.core.plant.state import PlantState
from safepde.exceptions import ContractViolation
from safepde.models.plant import PlantParameters


@dataclass(frozen=True)
class BoundaryDerivatives:
    """Entry [k] is the k-th time derivative; trailing axes follow the theta batch."""

    z1: np.ndarray
    z0: np.ndarray
    w0: np.ndarray
    w1: np.ndarray


def time_derivative_profiles(
    z: np.ndarray,
    w: np.ndarray,
    d1,
    d2,
    q1: float,
    q2: float,
    dx: float,
    order: int,
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Profiles of d^k z/dt^k and d^k w/dt^k for k = 0..order.

    ``d1``/``d2`` may be arrays of shape (k,); profiles then carry a leading
    batch axis from the first derivative on.
    """
    d1 = np.asarray(d1, dtype=float)[..., None]
    d2 = np.asarray(d2, dtype=float)[..., None]
    zs, ws = [np.asarray(z, dtype=float)], [np.asarray(w, dtype=float)]
    for _ in range(order):
        zk, wk = zs[-1], ws[-1]
        zx = np.gradient(zk, dx, axis=-1, edge_order=2)
        wx = np.gradient(wk, dx, axis=-1, edge_order=2)
        zs.append(-q1 * zx + d1 * wk)
        ws.append(q2 * wx + d2 * zk)
    return zs, ws


def boundary_time_derivatives(
    state: PlantState,
    theta,
    order: int,
    params: PlantParameters,
) -> BoundaryDerivatives:
    """z^{(k)}(1), z^{(k)}(0), w^{(k)}(0), w^{(k)}(1) for k = 0..order.

    ``theta`` is a (d1, d2, b) triple or a pair of arrays (d1s, d2s) for batched
    evaluation. z^{(k)}(0) follows the boundary condition z(0) = p w(0).
    """
    if order > params.m - 1 or order < 0:
        raise ContractViolation(
            f"boundary derivative order {order} exceeds m-1 = {params.m - 1}",
            details={"order": order, "m": params.m},
        )
    d1, d2 = theta[0], theta[1]
    batch = np.broadcast(np.asarray(d1), np.asarray(d2)).shape
    zs, ws = time_derivative_profiles(
        state.z, state.w, d1, d2, params.q1, params.q2, 1.0 / state.Nx, order
    )

    def edge(profiles, index):
        return np.stack([np.broadcast_to(pr[..., index], batch) for pr in profiles])

    w0 = edge(ws, 0)
    return BoundaryDerivatives(
        z1=edge(zs, -1),
        z0=params.p * w0,
        w0=w0,
        w1=edge(ws, -1),
    )
