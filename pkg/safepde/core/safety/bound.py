"""Safe lower bound on the adaptive control action over the feasible set."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from safepde.core.control.bank import ContextBank
from safepde.core.control.law import evaluate_law
from safepde.core.plant.state import PlantState
from safepde.exceptions import MissingContextError
from safepde.models.plant import PlantParameters, Theta


@dataclass(frozen=True)
class SafeActionBound:
    """c_max = max over the feasible triples of U*(chi; theta)."""

    c_max: float
    argmax: Theta
    values: np.ndarray  # U* per feasible triple

    def __float__(self) -> float:
        return self.c_max


def _rows_for(points: np.ndarray, bank: ContextBank, atol: float = 1e-9) -> np.ndarray:
    rows = np.empty(points.shape[0], dtype=int)
    for k, pt in enumerate(points):
        match = np.flatnonzero(np.all(np.abs(bank.thetas - pt) <= atol, axis=1))
        if match.size == 0:
            raise MissingContextError(pt)
        rows[k] = match[0]
    return rows


def safe_lower_bound(
    state: PlantState,
    feasible,
    bank: ContextBank,
    params: PlantParameters,
    cbar: Optional[float] = None,
) -> SafeActionBound:
    """Evaluate U* with rate ``cbar`` on h_m for every feasible triple and take the max.

    ``feasible`` is a FeasibleSet or an array of triples; each must have a
    context in ``bank``.
    """
    points = np.atleast_2d(np.asarray(getattr(feasible, "points", feasible), dtype=float))
    rows = _rows_for(points, bank)
    cbar = bank.contexts[0].gains.cbar if cbar is None else float(cbar)
    U_star = evaluate_law(state, bank, params, cbar).U[rows]
    k = int(np.argmax(U_star))
    return SafeActionBound(
        c_max=float(U_star[k]),
        argmax=Theta.from_array(points[k]),
        values=U_star,
    )
