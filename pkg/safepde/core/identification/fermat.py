"""Normal equations Z = G theta of the windowed least-squares problem."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from safepde.core.identification.accumulators import WindowSeries

InnerQuadrature = Literal["left", "trapezoid"]


@dataclass(frozen=True)
class FermatSystem:
    Z: np.ndarray  # (H1, H2, H3)
    G: np.ndarray  # [[Q1, Q2, 0], [Q2, Q3, 0], [0, 0, Q4]]
    mode: int
    t_start: float
    t_end: float

    @property
    def Q4(self) -> float:
        return float(self.G[2, 2])

    def residual(self, theta) -> np.ndarray:
        """|Z - G theta| for one triple or a batch (k, 3)."""
        theta = np.atleast_2d(np.asarray(theta, dtype=float))
        return np.linalg.norm(self.Z[None, :] - theta @ self.G.T, axis=1)

    def cost(self, theta) -> float:
        """Quadratic least-squares cost up to the theta-independent constant."""
        v = np.asarray(theta, dtype=float)
        return float(v @ self.G @ v - 2.0 * self.Z @ v)


def running_integral(values: np.ndarray, t: np.ndarray, rule: InnerQuadrature = "left") -> np.ndarray:
    """int_{t_0}^{t_k} values dt for every k (left-endpoint or trapezoid)."""
    if rule == "trapezoid":
        return cumulative_trapezoid(values, t, axis=-1, initial=0.0)
    dt = np.diff(t)
    out = np.zeros_like(values, dtype=float)
    out[..., 1:] = np.cumsum(values[..., :-1] * dt, axis=-1)
    return out


def assemble_fermat(window: WindowSeries, mode: int = 1, inner: InnerQuadrature = "left") -> FermatSystem:
    """Build (Z_n, G_n) for mode ``mode`` (1-based) over the window.

    Left-endpoint running sums match the explicit transport scheme, so the
    modal identity holds on simulator data up to round-off; the l.Y integral
    always uses the trapezoid rule.
    """
    t = window.t
    k = mode - 1
    a = window.a[k]
    p_n = a - a[0] - running_integral(window.transport[k], t, inner)
    g1 = running_integral(window.s_w[k], t, inner)
    g2 = running_integral(window.s_z[k], t, inner)
    p_b = window.y_n - window.y_n[0] - running_integral(window.ly, t, "trapezoid")
    q_b = running_integral(window.w0, t, inner)

    H1 = trapezoid(g1 * p_n, t)
    H2 = trapezoid(g2 * p_n, t)
    H3 = trapezoid(q_b * p_b, t)
    Q1 = trapezoid(g1 * g1, t)
    Q2 = trapezoid(g1 * g2, t)
    Q3 = trapezoid(g2 * g2, t)
    Q4 = trapezoid(q_b * q_b, t)
    G = np.array([[Q1, Q2, 0.0], [Q2, Q3, 0.0], [0.0, 0.0, Q4]])
    return FermatSystem(
        Z=np.array([H1, H2, H3]),
        G=G,
        mode=mode,
        t_start=float(t[0]),
        t_end=float(t[-1]),
    )
