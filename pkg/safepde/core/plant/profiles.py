"""Initial PDE profiles: expressions in x, named presets or tabulated samples."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import sympy as sp

from safepde.core.plant.nonlinearity import parse_symbolic
from safepde.exceptions import ConfigurationError

PROFILE_PRESETS: dict[str, str] = {
    "paper_w": "cos(2*pi*x)",
    "paper_z": "2*sin(3*pi*x)",
    "zero": "0",
}

_X = sp.Symbol("x")


@dataclass(frozen=True)
class ProfileSpec:
    """Exactly one of ``expression``, ``preset`` or ``samples`` is set.

    ``samples`` are values on a uniform grid over [0, 1] and are linearly
    interpolated onto the simulation grid.
    """

    expression: Optional[str] = None
    preset: Optional[str] = None
    samples: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        given = [v is not None for v in (self.expression, self.preset, self.samples)]
        if sum(given) != 1:
            raise ConfigurationError("profile needs exactly one of expression, preset, samples")
        if self.preset is not None and self.preset not in PROFILE_PRESETS:
            raise ConfigurationError(
                f"unknown profile preset {self.preset!r}",
                details={"known": sorted(PROFILE_PRESETS)},
            )
        if self.samples is not None and len(self.samples) < 2:
            raise ConfigurationError("tabulated profile needs at least 2 samples")

    def sample(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.samples is not None:
            table = np.asarray(self.samples, dtype=float)
            return np.interp(x, np.linspace(0.0, 1.0, table.size), table)
        text = self.expression if self.expression is not None else PROFILE_PRESETS[self.preset]
        expr = parse_symbolic(text, {"x": _X})
        fn = sp.lambdify(_X, expr, modules="numpy")
        return np.broadcast_to(np.asarray(fn(x), dtype=float), x.shape).copy()


def profile(value: str | Sequence[float] | None = None, *, preset: str | None = None) -> ProfileSpec:
    """Shorthand used by tests and scenario loading."""
    if preset is not None:
        return ProfileSpec(preset=preset)
    if isinstance(value, str):
        return ProfileSpec(expression=value)
    return ProfileSpec(samples=tuple(float(v) for v in value))
