"""Finite representation of the set of triples consistent with all past windows."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from safepde.core.identification.fermat import FermatSystem
from safepde.exceptions import FeasibleSetEmptyError
from safepde.models.plant import ThetaBox


@dataclass(frozen=True)
class FeasibleSet:
    """Grid triples plus offered candidates that satisfy every stored system."""

    points: np.ndarray  # (k, 3)
    systems: tuple[FermatSystem, ...] = field(default_factory=tuple)
    tolerance: float = 1e-4

    @classmethod
    def initial(cls, box: ThetaBox, pitch: float = 0.2, tolerance: float = 1e-4) -> "FeasibleSet":
        return cls(points=box.grid(pitch), systems=(), tolerance=tolerance)

    def __len__(self) -> int:
        return int(self.points.shape[0])

    def consistent(self, points: np.ndarray, systems: Iterable[FermatSystem]) -> np.ndarray:
        """Mask of points with residual <= tolerance (1 + |Z|) for every system."""
        points = np.atleast_2d(points)
        mask = np.ones(points.shape[0], dtype=bool)
        for s in systems:
            mask &= s.residual(points) <= self.tolerance * (1.0 + np.linalg.norm(s.Z))
        return mask

    def contains(self, theta, atol: float = 1e-9) -> bool:
        return bool(np.any(np.all(np.abs(self.points - np.asarray(theta, dtype=float)) <= atol, axis=1)))


def _append_unique(points: np.ndarray, extra: np.ndarray, atol: float = 1e-12) -> np.ndarray:
    points = points.reshape(-1, 3)
    for q in np.atleast_2d(extra):
        if not points.size or not np.any(np.all(np.abs(points - q) <= atol, axis=1)):
            points = np.vstack([points, q])
    return points


def update_feasible_set(
    systems: Sequence[FermatSystem],
    previous: FeasibleSet,
    box: ThetaBox,
    offered: Optional[np.ndarray] = None,
    trigger_time: float = 0.0,
    collapse: bool = False,
) -> FeasibleSet:
    """Prune ``previous`` with the new systems and add offered candidates.

    An offered triple joins only if it lies in the box and satisfies every
    system seen so far. With ``collapse`` (an informative window, which pins
    all three parameters) the set becomes the admitted offered triples alone;
    grid triples that survive only through the residual tolerance are dropped.
    """
    all_systems = tuple(previous.systems) + tuple(systems)
    keep = previous.points[previous.consistent(previous.points, systems)]

    if offered is not None:
        cand = np.atleast_2d(np.asarray(offered, dtype=float))
        in_box = np.array([box.contains(c) for c in cand], dtype=bool)
        cand = cand[in_box]
        if cand.size:
            cand = cand[previous.consistent(cand, all_systems)]
        if cand.size:
            keep = _append_unique(np.empty((0, 3)) if collapse else keep, cand)

    if keep.shape[0] == 0:
        raise FeasibleSetEmptyError(trigger_time, previous.tolerance)
    return FeasibleSet(points=keep.reshape(-1, 3), systems=all_systems, tolerance=previous.tolerance)
