"""Grid-refinement study: rerun with (dx, dt) halved per level and compare trajectories."""

from __future__ import annotations

import asyncio
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from safepde.exceptions import ConfigurationError
from safepde.harness.runner import RunResult, run_scenario
from safepde.harness.scenario import apply_overrides
from safepde.models.scenario import ScenarioConfig
from safepde.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass
class RefinementTable:
    Nx: list[int]
    dt: list[float]
    y1_diffs: list[float]  # max-norm of y1 between consecutive levels on the coarse time grid
    theta_diffs: list[Optional[float]] = field(default_factory=list)
    orders: list[float] = field(default_factory=list)

    @property
    def observed_order(self) -> Optional[float]:
        return self.orders[-1] if self.orders else None

    @property
    def monotone(self) -> bool:
        return all(b < a for a, b in zip(self.y1_diffs, self.y1_diffs[1:]))

    def as_dict(self) -> dict:
        out = asdict(self)
        out["observed_order"] = self.observed_order
        out["monotone"] = self.monotone
        return out


def _level_configs(config: ScenarioConfig, levels: int) -> list[ScenarioConfig]:
    if levels < 2:
        raise ConfigurationError("a refinement study needs at least 2 levels", details={"levels": levels})
    return [
        apply_overrides(config, nx=config.grid.Nx * 2**k, dt=config.grid.dt / 2**k)
        for k in range(levels)
    ]


def _coarse(result: RunResult, level: int, column: str) -> np.ndarray:
    return result.column(column)[:: 2**level]


def _table(configs: list[ScenarioConfig], results: list[RunResult]) -> RefinementTable:
    y1 = [_coarse(r, k, "y1") for k, r in enumerate(results)]
    size = min(len(v) for v in y1)
    y1_diffs = [float(np.max(np.abs(a[:size] - b[:size]))) for a, b in zip(y1, y1[1:])]

    theta_diffs: list[Optional[float]] = []
    if configs[0].run.mode == "adaptive":
        th = [np.stack([_coarse(r, k, c) for c in ("d1hat", "d2hat", "bhat")], axis=1)
              for k, r in enumerate(results)]
        theta_diffs = [float(np.max(np.abs(a[:size] - b[:size]))) for a, b in zip(th, th[1:])]

    orders = [
        float(np.log2(a / b)) for a, b in zip(y1_diffs, y1_diffs[1:]) if a > 0 and b > 0
    ]
    table = RefinementTable(
        Nx=[c.grid.Nx for c in configs],
        dt=[c.grid.dt for c in configs],
        y1_diffs=y1_diffs,
        theta_diffs=theta_diffs,
        orders=orders,
    )
    logger.info("refinement_completed", levels=len(configs), y1_diffs=y1_diffs, orders=orders)
    return table


def refinement_study(config: ScenarioConfig, levels: int = 3) -> RefinementTable:
    configs = _level_configs(config, levels)
    results = [run_scenario(c, write=False, diagnostics=False) for c in configs]
    return _table(configs, results)


async def refinement_study_async(config: ScenarioConfig, levels: int = 3) -> RefinementTable:
    """Same study with the levels run concurrently in worker threads."""
    configs = _level_configs(config, levels)
    results = await asyncio.gather(
        *(asyncio.to_thread(run_scenario, c, False, False) for c in configs)
    )
    return _table(configs, list(results))
