"""Gain thresholds that initialise the barrier chains positively, and auto gains."""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np

from safepde.config import get_settings
from safepde.core.control.bank import ContextBank, ContextStore
from safepde.core.control.law import bank_gamma_derivs
from safepde.core.kernels.gains import g_chain_rows
from safepde.core.plant.free_response import predict_Y_free
from safepde.core.plant.state import PlantState
from safepde.exceptions import ThresholdViolation
from safepde.models.plant import GainConfig, PlantParameters, SimGrid
from safepde.utils.logger import get_logger

logger = get_logger(__name__)

_DENOMINATOR_FLOOR = 1e-12


def check_kappa_thresholds(params: PlantParameters, Y_at, kappas: Sequence[float]) -> np.ndarray:
    """Thresholds for kappa_1..kappa_{n-1} given Y(1/q2).

    ``Y_at`` may be a batch (k, n); the maximum over the batch is returned.
    kappa_i enters only the thresholds of later indices.
    """
    n = params.n
    Y = np.atleast_2d(np.asarray(Y_at, dtype=float))
    if n == 1:
        return np.zeros(0)
    kappas = list(kappas) + [1.0] * (n - len(kappas))
    G = g_chain_rows(kappas, n)
    out = np.empty(n - 1)
    for i in range(1, n):
        prev = G[i - 1]
        z_i = Y[:, i - 1] - Y @ prev
        if np.any(z_i <= _DENOMINATOR_FLOOR * np.maximum(1.0, np.abs(Y).max(axis=1))):
            raise ThresholdViolation(
                f"z_{i}(1/q2) is not positive; kappa_{i} threshold is undefined",
                details={"index": i, "z_i": z_i.tolist()},
            )
        drift = Y[:, 1:i + 1] @ prev[:i]
        out[i - 1] = float(np.max((drift - Y[:, i]) / z_i))
    return out


def robust_kappa_thresholds(
    params: PlantParameters,
    state0: PlantState,
    kappas: Sequence[float],
    pitch: float = 0.2,
    b_points: Optional[int] = None,
) -> np.ndarray:
    """Maximum of the kappa thresholds over the b-range and the (d1, d2) grid."""
    if params.n == 1:
        return np.zeros(0)
    b_values = params.theta_box.b_samples(b_points or get_settings().THRESHOLD_B_POINTS)
    Ys = []
    for d1, d2 in params.theta_box.d_pairs(pitch):
        free = predict_Y_free(state0, params, theta=(d1, d2, params.b))
        Ys.extend(free.at_end(b) for b in b_values)
    return check_kappa_thresholds(params, np.array(Ys), kappas)


def require_kappas(kappas: Sequence[float], thresholds: np.ndarray) -> None:
    for i, (k, k_check) in enumerate(zip(kappas, thresholds), start=1):
        if k <= k_check:
            raise ThresholdViolation(
                f"kappa_{i} = {k:g} does not exceed its threshold {k_check:g}",
                details={"index": i, "kappa": k, "threshold": float(k_check)},
            )


def check_c_thresholds(params: PlantParameters, state0: PlantState, bank: ContextBank) -> np.ndarray:
    """Thresholds for c_1..c_{m-1}; maximum over the triples of ``bank``."""
    m = params.m
    if m == 1:
        return np.zeros(0)
    gammas, _ = bank_gamma_derivs(state0, bank, 1, params)
    X = state0.X
    f = params.nonlinearity.evaluate(X)
    h1 = X[0] - gammas[:, 0]
    if np.any(h1 <= _DENOMINATOR_FLOOR):
        raise ThresholdViolation(
            "h_1(0) is not positive; c_1 threshold is undefined",
            details={"h1_min": float(np.min(h1))},
        )
    c_check = (-X[1] - f[0] + gammas[:, 1]) / h1
    return np.array([float(np.max(c_check))])


def require_cs(cs: Sequence[float], thresholds: np.ndarray) -> None:
    for i, (c, c_check) in enumerate(zip(cs, thresholds), start=1):
        if c <= max(2.0, c_check):
            raise ThresholdViolation(
                f"c_{i} = {c:g} does not exceed max(2, {c_check:g})",
                details={"index": i, "c": c, "threshold": float(c_check)},
            )


def auto_gains(
    params: PlantParameters,
    state0: PlantState,
    grid: SimGrid,
    defaults: GainConfig,
    candidates: Optional[np.ndarray] = None,
    margin: float = 1.0,
    kappa_thresholds: Optional[Callable[[Sequence[float]], np.ndarray]] = None,
) -> GainConfig:
    """Pick gains just above their thresholds.

    kappa_i = max(1, threshold_i) + margin in order (each threshold depends on
    the earlier kappas), kappa_n from ``defaults``; then c_i = max(2, threshold_i)
    + margin for i < m over ``candidates`` (default: the true triple).
    """
    n = params.n
    thresholds_for = kappa_thresholds or (
        lambda ks: check_kappa_thresholds(params, predict_Y_free(state0, params).at_end(), ks)
    )
    kappas = list(defaults.kappas)
    for i in range(n - 1):
        k_check = thresholds_for(kappas)[i]
        kappas[i] = max(1.0, float(k_check)) + margin

    cs = list(defaults.cs)
    cs[-1] = max(defaults.c_m, 1.0 + margin)
    tentative = GainConfig(kappas=tuple(kappas), cs=tuple(max(c, 2.0 + margin) for c in cs[:-1]) + (cs[-1],))
    if params.m > 1:
        store = ContextStore(params, tentative, grid)
        thetas = np.atleast_2d(params.theta.as_array() if candidates is None else candidates)
        c_check = check_c_thresholds(params, state0, store.bank(thetas))
        for i, value in enumerate(c_check):
            cs[i] = max(2.0, float(value)) + margin
    gains = GainConfig(kappas=tuple(kappas), cs=tuple(cs), cbar=cs[-1])
    logger.info("auto_gains_selected", kappas=list(gains.kappas), cs=list(gains.cs))
    return gains
