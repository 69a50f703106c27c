"""One-dimensional QP safety filter: the half-line projection u >= c_max."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from safepde.core.control.bank import ContextBank, ContextStore
from safepde.core.plant.state import PlantState
from safepde.core.safety.bound import SafeActionBound, safe_lower_bound
from safepde.models.plant import PlantParameters
from safepde.utils.logger import get_logger

logger = get_logger(__name__)


def qp_filter(U_d: float, bound: Union[SafeActionBound, float]) -> float:
    """argmin |u - U_d|^2 subject to u >= c_max."""
    c_max = bound.c_max if isinstance(bound, SafeActionBound) else float(bound)
    return max(float(U_d), c_max)


@dataclass(frozen=True)
class FilterOutcome:
    U_d: float
    U_a: float
    bound: SafeActionBound
    active: bool

    @property
    def eta(self) -> float:
        """Override applied by the filter, U_d - U_a (<= 0)."""
        return self.U_d - self.U_a


class SafetyFilter:
    """Keeps the context bank of the current feasible set and filters U_d.

    The bank is rebuilt only when the feasible point set changes.
    """

    def __init__(self, store: ContextStore, params: PlantParameters, cbar: Optional[float] = None):
        self.store = store
        self.params = params
        self.cbar = store.gains.cbar if cbar is None else float(cbar)
        self._points_key: Optional[bytes] = None
        self._bank: Optional[ContextBank] = None
        self.active_steps = 0

    def bank_for(self, feasible) -> ContextBank:
        points = np.atleast_2d(np.asarray(getattr(feasible, "points", feasible), dtype=float))
        key = points.tobytes()
        if key != self._points_key:
            self._bank = self.store.bank(points)
            self._points_key = key
            logger.info("feasible_bank_rebuilt", size=len(self._bank))
        return self._bank

    def apply(self, state: PlantState, U_d: float, feasible) -> FilterOutcome:
        bank = self.bank_for(feasible)
        bound = safe_lower_bound(state, feasible, bank, self.params, self.cbar)
        U_a = qp_filter(U_d, bound)
        active = U_a > U_d
        if active:
            self.active_steps += 1
            logger.debug(
                "filter_active", t=state.t, U_d=U_d, c_max=bound.c_max, argmax=list(bound.argmax)
            )
        return FilterOutcome(U_d=float(U_d), U_a=U_a, bound=bound, active=active)
