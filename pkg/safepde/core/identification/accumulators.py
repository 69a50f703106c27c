"""Per-step spatial functionals feeding the batch least-squares identifier."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from safepde.core.plant.state import PlantState
from safepde.core.quadrature import trapezoid_weights
from safepde.exceptions import ContractViolation
from safepde.models.plant import PlantParameters

TransportQuadrature = Literal["upwind", "cosine"]


@dataclass(frozen=True)
class WindowSeries:
    """Functionals on a common time base; modal arrays are (modes, K)."""

    t: np.ndarray
    a: np.ndarray  # int sin(n pi x)(z + w)
    c: np.ndarray  # int cos(n pi x)(q1 z - q2 w)
    transport: np.ndarray  # modal transport rate, n pi c or its upwind form
    s_z: np.ndarray
    s_w: np.ndarray
    y_n: np.ndarray
    ly: np.ndarray  # l . Y
    w0: np.ndarray

    @property
    def modes(self) -> int:
        return self.a.shape[0]

    @classmethod
    def zeros(cls, t: np.ndarray, modes: int = 1) -> "WindowSeries":
        k = t.size
        zm = np.zeros((modes, k))
        return cls(t=t, a=zm, c=zm.copy(), transport=zm.copy(), s_z=zm.copy(),
                   s_w=zm.copy(), y_n=np.zeros(k), ly=np.zeros(k), w0=np.zeros(k))


class WindowAccumulators:
    """Appends one sample per simulation step and slices windows by step index."""

    def __init__(
        self,
        params: PlantParameters,
        Nx: int,
        modes: int = 1,
        transport_quadrature: TransportQuadrature = "upwind",
    ):
        if modes < 1:
            raise ContractViolation("at least one mode is required")
        if transport_quadrature not in ("upwind", "cosine"):
            raise ContractViolation(f"unknown transport quadrature {transport_quadrature!r}")
        self.params = params
        self.modes = modes
        self.transport_quadrature = transport_quadrature
        x = np.linspace(0.0, 1.0, Nx + 1)
        self._dx = 1.0 / Nx
        weights = trapezoid_weights(Nx + 1, self._dx)
        n = np.arange(1, modes + 1)[:, None]
        sin = np.sin(n * np.pi * x)
        sin[:, 0] = sin[:, -1] = 0.0
        self._sin_w = sin * weights
        self._cos_w = np.cos(n * np.pi * x) * weights
        self._npi = (n * np.pi)[:, 0]
        self._rows: list[tuple] = []
        self._index: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self._rows)

    def accumulate(self, state: PlantState) -> None:
        p = self.params
        z, w = state.z, state.w
        s_z = self._sin_w @ z
        s_w = self._sin_w @ w
        c = self._cos_w @ (p.q1 * z - p.q2 * w)
        if self.transport_quadrature == "cosine":
            transport = self._npi * c
        else:
            dz = np.zeros_like(z)
            dw = np.zeros_like(w)
            dz[1:] = (z[1:] - z[:-1]) / self._dx
            dw[:-1] = (w[1:] - w[:-1]) / self._dx
            transport = self._sin_w @ (-p.q1 * dz + p.q2 * dw)
        self._index[state.step_index] = len(self._rows)
        self._rows.append((
            state.t, s_z + s_w, c, transport, s_z, s_w,
            float(state.Y[-1]), float(p.l @ state.Y), float(w[0]),
        ))

    def window(self, start_step: int, end_step: int) -> WindowSeries:
        """Samples with step indices start_step..end_step inclusive."""
        try:
            lo, hi = self._index[start_step], self._index[end_step]
        except KeyError as e:
            raise ContractViolation(f"no accumulated sample for step {e.args[0]}") from e
        rows = self._rows[lo:hi + 1]
        cols = list(zip(*rows))
        return WindowSeries(
            t=np.array(cols[0]),
            a=np.array(cols[1]).T,
            c=np.array(cols[2]).T,
            transport=np.array(cols[3]).T,
            s_z=np.array(cols[4]).T,
            s_w=np.array(cols[5]).T,
            y_n=np.array(cols[6]),
            ly=np.array(cols[7]),
            w0=np.array(cols[8]),
        )

    def discard_before(self, step: int) -> None:
        """Drop samples older than ``step`` (they can no longer start a window)."""
        if step not in self._index:
            return
        cut = self._index[step]
        self._rows = self._rows[cut:]
        self._index = {k: v - cut for k, v in self._index.items() if v >= cut}
