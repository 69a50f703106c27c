"""Plant, parameter-box, grid and gain types shared by every module."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, NamedTuple, Sequence

import numpy as np

from safepde.exceptions import CFLViolation, ConfigurationError, NonHurwitzError, ThresholdViolation

if TYPE_CHECKING:
    from safepde.core.plant.nonlinearity import StrictFeedbackNonlinearity


class Theta(NamedTuple):
    """Unknown parameter triple (d1, d2, b)."""

    d1: float
    d2: float
    b: float

    def as_array(self) -> np.ndarray:
        return np.array([self.d1, self.d2, self.b], dtype=float)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "Theta":
        d1, d2, b = (float(v) for v in values)
        return cls(d1, d2, b)


@dataclass(frozen=True)
class ThetaBox:
    """Known bounds of the unknown parameters."""

    d1_min: float
    d1_max: float
    d2_min: float
    d2_max: float
    b_min: float
    b_max: float

    def __post_init__(self):
        if self.d1_min > self.d1_max or self.d2_min > self.d2_max:
            raise ConfigurationError("theta box bounds must satisfy min <= max")
        if not 0 < self.b_min <= self.b_max:
            raise ConfigurationError("theta box needs 0 < b_min <= b_max")

    @property
    def lower(self) -> np.ndarray:
        return np.array([self.d1_min, self.d2_min, self.b_min])

    @property
    def upper(self) -> np.ndarray:
        return np.array([self.d1_max, self.d2_max, self.b_max])

    def contains(self, theta, atol: float = 1e-12) -> bool:
        v = np.asarray(theta, dtype=float)
        return bool(np.all(v >= self.lower - atol) and np.all(v <= self.upper + atol))

    def project(self, theta) -> Theta:
        return Theta.from_array(np.clip(np.asarray(theta, dtype=float), self.lower, self.upper))

    @staticmethod
    def _axis(lo: float, hi: float, pitch: float) -> np.ndarray:
        """Multiples of ``pitch`` inside [lo, hi] plus both ends."""
        first = int(np.ceil(lo / pitch - 1e-9))
        last = int(np.floor(hi / pitch + 1e-9))
        inner = np.round(pitch * np.arange(first, last + 1), 12)
        pts = np.unique(np.concatenate([[lo], inner, [hi]]))
        keep = np.concatenate([[True], np.diff(pts) > 1e-9])
        return pts[keep]

    def grid(self, pitch: float = 0.2) -> np.ndarray:
        """All grid triples of pitch ``pitch`` inside the box, shape (k, 3)."""
        if pitch <= 0:
            raise ConfigurationError("grid pitch must be positive")
        axes = [
            self._axis(self.d1_min, self.d1_max, pitch),
            self._axis(self.d2_min, self.d2_max, pitch),
            self._axis(self.b_min, self.b_max, pitch),
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def d_pairs(self, pitch: float = 0.2) -> np.ndarray:
        """Distinct (d1, d2) pairs of the pitch grid, shape (k, 2)."""
        return np.unique(self.grid(pitch)[:, :2], axis=0)

    def b_samples(self, count: int) -> np.ndarray:
        return np.linspace(self.b_min, self.b_max, count)


@dataclass(frozen=True)
class PlantParameters:
    """Physical constants of the ODE-PDE-ODE sandwich plant.

    ``l`` is the last row of the companion matrix A, ``qbar`` holds the
    boundary-feedthrough coefficients of z(1), z_t(1), ... in the last
    actuator equation.
    """

    q1: float
    q2: float
    d1: float
    d2: float
    p: float
    b: float
    l: np.ndarray
    M: np.ndarray
    qbar: np.ndarray
    nonlinearity: "StrictFeedbackNonlinearity"
    theta_box: ThetaBox
    check_box: bool = field(default=True, compare=False)

    def __post_init__(self):
        for name in ("l", "M", "qbar"):
            object.__setattr__(self, name, np.atleast_1d(np.asarray(getattr(self, name), dtype=float)))
        if self.q1 <= 0 or self.q2 <= 0:
            raise ConfigurationError("transport speeds q1, q2 must be positive")
        if self.b <= 0:
            raise ConfigurationError("input coefficient b must be positive")
        if self.M.shape != self.l.shape:
            raise ConfigurationError("M and l must have the same length n")
        if self.m not in (1, 2):
            raise ConfigurationError("actuator chain length m must be 1 or 2", details={"m": self.m})
        if self.nonlinearity.m != self.m:
            raise ConfigurationError(
                "nonlinearity must define one rule per actuator state",
                details={"rules": self.nonlinearity.m, "m": self.m},
            )
        if self.check_box and not self.theta_box.contains(self.theta):
            raise ConfigurationError(
                "parameter triple lies outside the theta box",
                details={"theta": list(self.theta)},
            )

    @property
    def n(self) -> int:
        return int(self.l.size)

    @property
    def m(self) -> int:
        return int(self.qbar.size)

    @property
    def theta(self) -> Theta:
        return Theta(float(self.d1), float(self.d2), float(self.b))

    @property
    def A(self) -> np.ndarray:
        """Companion matrix with ``l`` as its last row."""
        n = self.n
        A = np.zeros((n, n))
        A[np.arange(n - 1), np.arange(1, n)] = 1.0
        A[-1, :] = self.l
        return A

    @property
    def B(self) -> np.ndarray:
        e = np.zeros(self.n)
        e[-1] = self.b
        return e

    def with_theta(self, theta) -> "PlantParameters":
        """Copy with (d1, d2, b) replaced, e.g. by an estimate or a grid candidate."""
        d1, d2, b = (float(v) for v in theta)
        return replace(self, d1=d1, d2=d2, b=b)


@dataclass(frozen=True)
class SimGrid:
    """Uniform space grid with Nx cells and a fixed time step."""

    Nx: int
    dt: float

    def __post_init__(self):
        if self.Nx < 2:
            raise ConfigurationError("grid needs at least 2 cells (3 points)")
        if self.dt <= 0:
            raise ConfigurationError("time step must be positive")

    @property
    def dx(self) -> float:
        return 1.0 / self.Nx

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.Nx + 1)

    def check_cfl(self, q1: float, q2: float) -> None:
        speed = max(q1, q2)
        if self.dt * speed > self.dx * (1.0 + 1e-12):
            raise CFLViolation(self.dt, self.dx, speed)

    def refined(self, level: int) -> "SimGrid":
        return SimGrid(Nx=self.Nx * 2**level, dt=self.dt / 2**level)


@dataclass(frozen=True)
class GainConfig:
    """Design gains: kappa for the distal chain, c for the actuator chain."""

    kappas: tuple[float, ...]
    cs: tuple[float, ...]
    cbar: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kappas", tuple(float(k) for k in self.kappas))
        object.__setattr__(self, "cs", tuple(float(c) for c in self.cs))
        if self.cbar is None:
            object.__setattr__(self, "cbar", self.cs[-1])
        if any(k <= 0 for k in self.kappas):
            raise NonHurwitzError(self.kappas)
        if self.cs[-1] <= 1:
            raise ThresholdViolation("c_m must exceed 1", details={"cs": list(self.cs)})
        if any(c <= 2 for c in self.cs[:-1]):
            raise ThresholdViolation("c_i must exceed 2 for i < m", details={"cs": list(self.cs)})
        if self.cbar < self.cs[-1]:
            raise ThresholdViolation(
                "cbar must be >= c_m", details={"cbar": self.cbar, "c_m": self.cs[-1]}
            )

    @property
    def c_m(self) -> float:
        return self.cs[-1]

    def check_dimensions(self, n: int, m: int) -> None:
        if len(self.kappas) != n or len(self.cs) != m:
            raise ConfigurationError(
                "gain vector lengths must match (n, m)",
                details={"kappas": len(self.kappas), "cs": len(self.cs), "n": n, "m": m},
            )
