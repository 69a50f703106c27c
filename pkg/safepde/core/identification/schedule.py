"""Trigger instants t_i = i T and window starts mu_{i+1}."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from safepde.exceptions import ConfigurationError


@dataclass(frozen=True)
class TriggerSchedule:
    T: float
    Ntilde: int

    def __post_init__(self):
        if self.T <= 0:
            raise ConfigurationError("trigger period T must be positive")
        if self.Ntilde < 1:
            raise ConfigurationError("window depth Ntilde must be a positive integer")

    @property
    def _T(self) -> Fraction:
        # decimal value of T, so that i*T is exact for T like 1.5 or 0.1
        return Fraction(repr(float(self.T)))

    def trigger_time(self, i: int) -> float:
        return float(i * self._T)

    def schedule(self, i: int) -> tuple[float, float]:
        """(t_{i+1}, mu_{i+1}) with mu_{i+1} = min{t_g : g <= i, t_g >= t_{i+1} - Ntilde T}."""
        if i < 0:
            raise ConfigurationError("trigger index must be non-negative")
        g = max(0, i + 1 - self.Ntilde)
        return float((i + 1) * self._T), float(g * self._T)

    def step_index(self, t: float, dt: float) -> int:
        return int(round(t / dt))
