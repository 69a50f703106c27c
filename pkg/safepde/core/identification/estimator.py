"""Estimate update from stacked normal equations, with rank detection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from safepde.core.identification.fermat import FermatSystem
from safepde.models.plant import Theta, ThetaBox


@dataclass(frozen=True)
class EstimateUpdate:
    theta: Theta
    candidate: Theta  # before the small-change hold
    d_rank: int
    b_identified: bool
    held: bool

    @property
    def exact(self) -> bool:
        return self.d_rank == 2 and self.b_identified


def _closest_on_line(point: np.ndarray, direction: np.ndarray, target: np.ndarray,
                     lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Closest point to ``target`` on {point + s direction} inside the box."""
    s_star = float(direction @ (target - point))
    lo, hi = -np.inf, np.inf
    for k in range(point.size):
        if abs(direction[k]) < 1e-14:
            continue
        a = (lower[k] - point[k]) / direction[k]
        b = (upper[k] - point[k]) / direction[k]
        lo, hi = max(lo, min(a, b)), min(hi, max(a, b))
    if lo <= hi:
        s_star = min(max(s_star, lo), hi)
    return np.clip(point + s_star * direction, lower, upper)


def update_estimate(
    systems: Sequence[FermatSystem],
    previous,
    box: ThetaBox,
    rank_tol: float = 1e-8,
    hold_fraction: float = 0.05,
) -> EstimateUpdate:
    """Least-squares triple consistent with all modes, projected into the box.

    Rank-deficient (d1, d2) data keeps the previous pair projected onto the
    affine solution set; b is updated only when Q4 exceeds ``rank_tol``. If
    every component moves by less than ``hold_fraction`` of its previous
    value the previous estimate is kept.
    """
    prev = np.asarray(previous, dtype=float)
    A_d = np.vstack([s.G[:2, :2] for s in systems])
    z_d = np.concatenate([s.Z[:2] for s in systems])

    _, sv, Vt = np.linalg.svd(A_d)
    s_max = float(sv[0]) if sv.size else 0.0
    rank = int(np.sum(sv > rank_tol * s_max)) if s_max > 0 else 0

    lower, upper = box.lower[:2], box.upper[:2]
    if rank == 2:
        d = np.clip(np.linalg.lstsq(A_d, z_d, rcond=None)[0], lower, upper)
    elif rank == 1:
        particular = np.linalg.lstsq(A_d, z_d, rcond=rank_tol)[0]
        d = _closest_on_line(particular, Vt[1], prev[:2], lower, upper)
    else:
        d = prev[:2].copy()

    Q4 = systems[0].Q4
    b_identified = Q4 > rank_tol
    if b_identified:
        b = float(np.clip(systems[0].Z[2] / Q4, box.b_min, box.b_max))
    else:
        b = float(prev[2])

    candidate = np.array([d[0], d[1], b])
    change = np.abs(candidate - prev)
    held = bool(hold_fraction > 0 and np.all(change < hold_fraction * np.abs(prev)))
    theta = prev if held else candidate
    return EstimateUpdate(
        theta=Theta.from_array(theta),
        candidate=Theta.from_array(candidate),
        d_rank=rank,
        b_identified=bool(b_identified),
        held=held,
    )
