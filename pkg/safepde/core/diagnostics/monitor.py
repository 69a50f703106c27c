"""Safety margins, divergence and post-identification decay over a recorded run."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from safepde.utils.logger import get_logger

logger = get_logger(__name__)

DIVERGENCE_FACTOR = 10.0
Y1_RELATIVE_TOL = 1e-6


@dataclass(frozen=True)
class MonitorSeries:
    """Time series gathered by the runner; rows without diagnostics hold NaN."""

    t: np.ndarray
    y1: np.ndarray
    norm_sq: np.ndarray
    h: np.ndarray  # (K, m)
    Z: np.ndarray  # (K, n)
    beta_min: np.ndarray
    V: Optional[np.ndarray] = None


@dataclass
class MarginsReport:
    tol_num: float
    y1_tol: float
    y1_min: float
    z_min: list[Optional[float]]
    beta_min: Optional[float]
    h_min: list[Optional[float]]
    diverged: bool
    norm_ratio: float
    violations: list[str] = field(default_factory=list)

    @property
    def safe(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        out = asdict(self)
        out["safe"] = self.safe
        return out


@dataclass(frozen=True)
class DecayReport:
    passed: bool
    checked: int
    worst_ratio: Optional[float]
    slack: float


def _nanmin(values: np.ndarray) -> Optional[float]:
    finite = values[np.isfinite(values)]
    return float(np.min(finite)) if finite.size else None


def safety_monitor(
    series: MonitorSeries,
    q2: float,
    tol_num: float,
    y1_rel_tol: float = Y1_RELATIVE_TOL,
) -> MarginsReport:
    """Minima of y1 (all t), z_i and beta (t >= 1/q2) and h_i (all t).

    y1 may not drop below -y1_rel_tol |y1(0)|; the other minima get the
    scheme-order slack -tol_num. A non-finite norm or one above ten times its
    initial value flags divergence.
    """
    t = series.t
    late = t >= 1.0 / q2 - 1e-12
    violations: list[str] = []

    y1_min = float(np.min(series.y1)) if series.y1.size else 0.0
    y1_tol = y1_rel_tol * abs(float(series.y1[0])) if series.y1.size else 0.0
    if y1_min < -y1_tol:
        violations.append("y1")

    z_min = []
    for i in range(series.Z.shape[1] if series.Z.ndim == 2 else 0):
        value = _nanmin(series.Z[late, i])
        z_min.append(value)
        if value is not None and value < -tol_num:
            violations.append(f"z{i + 1}")

    beta_min = _nanmin(series.beta_min[late])
    if beta_min is not None and beta_min < -tol_num:
        violations.append("beta")

    h_min = []
    for i in range(series.h.shape[1] if series.h.ndim == 2 else 0):
        value = _nanmin(series.h[:, i])
        h_min.append(value)
        if value is not None and value < -tol_num:
            violations.append(f"h{i + 1}")

    norms = series.norm_sq
    if norms.size and norms[0] > 0:
        ratio = float(np.max(norms) / norms[0]) if np.all(np.isfinite(norms)) else float("inf")
    else:
        ratio = 0.0 if np.all(np.isfinite(norms)) else float("inf")
    diverged = not np.isfinite(ratio) or ratio >= DIVERGENCE_FACTOR

    report = MarginsReport(
        tol_num=tol_num,
        y1_tol=y1_tol,
        y1_min=y1_min,
        z_min=z_min,
        beta_min=beta_min,
        h_min=h_min,
        diverged=bool(diverged),
        norm_ratio=ratio,
        violations=violations,
    )
    if violations:
        logger.warning("safety_margin_violated", violations=violations, tol_num=tol_num)
    if diverged:
        logger.warning("divergence_detected", norm_ratio=ratio)
    return report


def decay_check(
    t: np.ndarray,
    V: np.ndarray,
    t_f: float,
    sigma0: float,
    q2: float,
    slack: float = 1.05,
) -> DecayReport:
    """V(t) <= slack V(t_f) exp(-sigma0 (t - t_f)) for t >= t_f + 1/q2.

    V(t_f) is the first finite V at or after t_f.
    """
    finite = np.isfinite(V)
    at_f = np.flatnonzero(finite & (t >= t_f - 1e-12))
    if at_f.size == 0:
        return DecayReport(passed=True, checked=0, worst_ratio=None, slack=slack)
    k0 = int(at_f[0])
    t0, V0 = float(t[k0]), float(V[k0])
    mask = finite & (t >= t_f + 1.0 / q2 - 1e-12)
    if not np.any(mask) or V0 <= 0.0:
        return DecayReport(passed=True, checked=int(np.sum(mask)), worst_ratio=None, slack=slack)
    bound = V0 * np.exp(-sigma0 * (t[mask] - t0))
    ratios = V[mask] / bound
    worst = float(np.max(ratios))
    return DecayReport(passed=worst <= slack, checked=int(np.sum(mask)), worst_ratio=worst, slack=slack)
