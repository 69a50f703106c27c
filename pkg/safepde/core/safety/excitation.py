"""Detectors for identification-blind data and the positive excitation they trigger.

Three situations leave the least-squares problem without information:

1. z(., t) stays proportional to p w(., t) over the first half of a window;
2. the run starts from zero profiles and the applied input stays zero past 1/q1;
3. w(0, t) stays at zero over a whole window.

Each schedules a constant pulse eps_exc > 0 added on top of U_a, so the
applied input remains above the safe lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from safepde.core.identification.schedule import TriggerSchedule
from safepde.core.plant.state import PlantState
from safepde.exceptions import ConfigurationError
from safepde.models.plant import PlantParameters
from safepde.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class ExcitationDecision:
    amount: float
    reason: Optional[str] = None

    @property
    def active(self) -> bool:
        return self.amount > 0.0


class ExcitationMonitor:
    def __init__(
        self,
        params: PlantParameters,
        schedule: TriggerSchedule,
        dt: float,
        eps_prop: float = 1e-6,
        eps_abs: float = 1e-9,
        eps_exc: float = 0.1,
        enabled: bool = True,
    ):
        if eps_exc <= 0:
            raise ConfigurationError("excitation amplitude must be positive", details={"eps_exc": eps_exc})
        self.params = params
        self.schedule = schedule
        self.dt = dt
        self.eps_prop = eps_prop
        self.eps_abs = eps_abs
        self.eps_exc = eps_exc
        self.enabled = enabled

        self._window = 0
        self._proportional = True
        self._w0_zero = True
        self._zero_start: Optional[bool] = None
        self._input_zero = True
        self._case2_checked = False
        self._inject_from = np.inf
        self._inject_until = -np.inf
        self._reason: Optional[str] = None
        self.injections: list[tuple[float, float, str]] = []

    def deactivate(self) -> None:
        self.enabled = False
        self._inject_until = -np.inf

    def record_input(self, U: float) -> None:
        """Applied input of the step just taken (before any injection)."""
        if abs(U) > self.eps_abs:
            self._input_zero = False

    def _schedule(self, start: float, end: float, reason: str) -> None:
        if start >= self._inject_from and end <= self._inject_until:
            return
        self._inject_from, self._inject_until, self._reason = start, end, reason
        self.injections.append((start, end, reason))
        logger.warning("excitation_scheduled", reason=reason, start=start, end=end, amplitude=self.eps_exc)

    def _step_of(self, t: float) -> int:
        return int(round(t / self.dt))

    def __call__(self, state: PlantState) -> ExcitationDecision:
        if not self.enabled:
            return ExcitationDecision(0.0)
        p = self.params
        T = self.schedule.T
        k = state.step_index
        window_start = self.schedule.trigger_time(self._window)
        window_end = self.schedule.trigger_time(self._window + 1)

        if self._zero_start is None:
            self._zero_start = bool(
                np.max(np.abs(state.z)) <= self.eps_abs and np.max(np.abs(state.w)) <= self.eps_abs
            )

        # window bookkeeping at trigger instants
        if k == self._step_of(window_end):
            if self._w0_zero:
                self._schedule(window_end, window_end + 0.5 * T, "boundary_silent")
            if self._zero_start and self._input_zero and state.t >= 1.0 / p.q1:
                self._schedule(window_end, window_end + 0.5 * T, "zero_input")
            self._window += 1
            self._proportional = True
            self._w0_zero = True
            window_start, window_end = window_end, self.schedule.trigger_time(self._window + 1)

        half = window_start + 0.5 * T
        if k < self._step_of(half):
            scale = max(float(np.max(np.abs(state.z))), self.eps_abs)
            if float(np.max(np.abs(state.z - p.p * state.w))) > self.eps_prop * scale:
                self._proportional = False
        elif k == self._step_of(half) and self._proportional:
            self._schedule(half, window_end, "proportional_profiles")
        if abs(float(state.w[0])) > self.eps_abs:
            self._w0_zero = False

        if not self._case2_checked and state.t >= 1.0 / p.q1:
            self._case2_checked = True
            if self._zero_start and self._input_zero:
                self._schedule(state.t, state.t + 0.5 * T, "zero_input")

        if np.isfinite(self._inject_from) and self._step_of(self._inject_from) <= k < self._step_of(self._inject_until):
            return ExcitationDecision(self.eps_exc, self._reason)
        return ExcitationDecision(0.0)
