"""Stacked controller contexts for vectorised evaluation over many triples."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from cachetools import LRUCache

from safepde.config import Settings, get_settings
from safepde.core.control.context import ControllerContext, build_context
from safepde.core.kernels.context import KernelRowCache
from safepde.exceptions import MissingContextError
from safepde.models.plant import GainConfig, PlantParameters, SimGrid, Theta
from safepde.utils.logger import get_logger

logger = get_logger(__name__)


def _theta_key(theta) -> tuple:
    return tuple(round(float(v), 10) for v in theta)


@dataclass(frozen=True)
class ContextBank:
    """Arrays with a leading axis over parameter triples."""

    thetas: np.ndarray  # (k, 3)
    z_coef: np.ndarray  # (k, m+1, N)
    w_coef: np.ndarray
    x1_coef: np.ndarray  # (k, m+1)
    lambdaA: np.ndarray  # (k, m+1, n)
    contexts: tuple[ControllerContext, ...]

    @classmethod
    def from_contexts(cls, contexts: Sequence[ControllerContext]) -> "ContextBank":
        contexts = tuple(contexts)
        return cls(
            thetas=np.array([c.theta for c in contexts], dtype=float).reshape(-1, 3),
            z_coef=np.stack([c.z_coef for c in contexts]),
            w_coef=np.stack([c.w_coef for c in contexts]),
            x1_coef=np.stack([c.x1_coef for c in contexts]),
            lambdaA=np.stack([c.lambdaA for c in contexts]),
            contexts=contexts,
        )

    def __len__(self) -> int:
        return len(self.contexts)

    @property
    def d1(self) -> np.ndarray:
        return self.thetas[:, 0]

    @property
    def d2(self) -> np.ndarray:
        return self.thetas[:, 1]


class ContextStore:
    """Builds controller contexts on demand and hands out banks for sets of triples.

    Contexts are kept in an LRU cache keyed by the rounded triple; kernel rows
    are shared through a KernelRowCache.
    """

    def __init__(
        self,
        params: PlantParameters,
        gains: GainConfig,
        grid: SimGrid,
        settings: Optional[Settings] = None,
    ):
        self.params = params
        self.gains = gains
        self.grid = grid
        self._settings = settings or get_settings()
        self.rows = KernelRowCache(self._settings)
        self._contexts: LRUCache = LRUCache(maxsize=self._settings.CONTEXT_CACHE_SIZE)

    def context(self, theta) -> ControllerContext:
        key = _theta_key(theta)
        if key in self._contexts:
            return self._contexts[key]
        ctx = build_context(self.params, theta, self.gains, self.grid, cache=self.rows)
        self._contexts[key] = ctx
        return ctx

    def bank(self, thetas: Iterable) -> ContextBank:
        contexts = [self.context(Theta.from_array(t)) for t in np.atleast_2d(np.asarray(thetas, dtype=float))]
        logger.debug("context_bank_built", size=len(contexts), cached_rows=len(self.rows))
        return ContextBank.from_contexts(contexts)

    def lookup(self, thetas: Iterable) -> ContextBank:
        """Bank of already-built contexts; a missing triple is a fault."""
        contexts = []
        for t in np.atleast_2d(np.asarray(thetas, dtype=float)):
            key = _theta_key(t)
            if key not in self._contexts:
                raise MissingContextError(t)
            contexts.append(self._contexts[key])
        return ContextBank.from_contexts(contexts)
