"""Gamma derivatives, the tau-chain and the output-positive control law.

Everything is evaluated over a ContextBank so that U (nominal rate c_m) and
U* (filter rate cbar) for many candidate triples share one code path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from safepde.core.control.bank import ContextBank
from safepde.core.control.context import ControllerContext
from safepde.core.plant.boundary import BoundaryDerivatives, boundary_time_derivatives
from safepde.core.plant.state import PlantState
from safepde.exceptions import ContractViolation, NumericFault
from safepde.models.plant import PlantParameters


@dataclass(frozen=True)
class LawEvaluation:
    """Per-triple values; leading axis follows the bank."""

    U: np.ndarray  # (k,)
    gammas: np.ndarray  # (k, m+1): Gamma, Gamma', ...
    h: np.ndarray  # (k, m)
    z1: np.ndarray  # (m, k): z(1), z_t(1), ...


def _check_finite(value: np.ndarray, term: str, state: PlantState) -> None:
    if not np.all(np.isfinite(value)):
        raise NumericFault(
            f"non-finite {term} in control law at step {state.step_index}",
            step_index=state.step_index,
            term=term,
        )


def bank_gamma_derivs(
    state: PlantState, bank: ContextBank, order: int, params: PlantParameters
) -> tuple[np.ndarray, BoundaryDerivatives]:
    """Gamma^{(i)} for i = 0..order over the bank, shape (k, order+1).

    Each row is the exact time derivative of the previous one along the
    semi-discrete plant, so the h-chain holds on the grid. Only Gamma'' needs
    dx1/dt = x2 + f1(x1).
    """
    if order > params.m:
        raise ContractViolation(f"Gamma derivative order {order} exceeds m = {params.m}")
    bd = boundary_time_derivatives(state, (bank.d1, bank.d2), params.m - 1, params)
    X = state.X
    out = []
    for i in range(order + 1):
        g = (
            bank.z_coef[:, i, :] @ state.z
            + bank.w_coef[:, i, :] @ state.w
            + bank.x1_coef[:, i] * X[0]
            + bank.lambdaA[:, i, :] @ state.Y
        )
        if i == 2:
            f = params.nonlinearity.evaluate(X)
            g = g + bank.x1_coef[:, 1] * (X[1] + f[0])
        out.append(g)
    gammas = np.stack(out, axis=1)
    _check_finite(gammas, "Gamma", state)
    return gammas, bd


def evaluate_law(
    state: PlantState, bank: ContextBank, params: PlantParameters, c_last: float
) -> LawEvaluation:
    """tau_m - sum qbar_i z^{(i)}(1) - M.Y + Gamma^{(m)} with rate ``c_last`` on h_m."""
    m = params.m
    cs = bank.contexts[0].gains.cs
    gammas, bd = bank_gamma_derivs(state, bank, m, params)
    X = state.X
    f = params.nonlinearity.evaluate(X)
    z1 = np.broadcast_to(bd.z1[:m], (m, len(bank)))
    feedthrough = np.einsum("i,ik->k", params.qbar, z1) + params.M @ state.Y

    h1 = X[0] - gammas[:, 0]
    if m == 1:
        U = -c_last * h1 - f[0] - feedthrough + gammas[:, 1]
        h = h1[:, None]
    else:
        c1 = cs[0]
        df1 = params.nonlinearity.df1_dx1(X)
        tau1 = -c1 * h1 - f[0]
        h2 = X[1] - tau1 - gammas[:, 1]
        tau2 = -c_last * h2 - f[1] + (-c1 - df1) * (X[1] + f[0]) + c1 * gammas[:, 1]
        U = tau2 - feedthrough + gammas[:, 2]
        h = np.stack([h1, h2], axis=1)
    _check_finite(U, "U", state)
    return LawEvaluation(U=U, gammas=gammas, h=h, z1=np.array(z1))


def gamma_derivs(
    state: PlantState, context: ControllerContext, order: int, params: PlantParameters
) -> np.ndarray:
    """Gamma, Gamma', ..., Gamma^{(order)} for a single context."""
    gammas, _ = bank_gamma_derivs(state, ContextBank.from_contexts([context]), order, params)
    return gammas[0]


def control_U(
    state: PlantState,
    context: ControllerContext,
    params: PlantParameters,
    c_last: Optional[float] = None,
) -> float:
    """U with c_last = c_m (default) or U* with c_last = cbar."""
    c_last = context.gains.c_m if c_last is None else c_last
    return float(evaluate_law(state, ContextBank.from_contexts([context]), params, c_last).U[0])
