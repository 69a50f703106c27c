"""Sampled plant state."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from safepde.core.quadrature import trapezoid_weights
from safepde.exceptions import ContractViolation
from safepde.models.plant import PlantParameters
from safepde.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class PlantState:
    """PDE profiles z, w on Nx+1 uniform points plus ODE vectors X, Y at time t."""

    t: float
    z: np.ndarray
    w: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    step_index: int = 0

    def __post_init__(self):
        if self.z.shape != self.w.shape or self.z.ndim != 1 or self.z.size < 3:
            raise ContractViolation(
                "z and w must be 1-D profiles of equal length >= 3",
                details={"z": list(self.z.shape), "w": list(self.w.shape)},
            )

    @property
    def Nx(self) -> int:
        return self.z.size - 1

    @classmethod
    def initial(
        cls,
        z: np.ndarray,
        w: np.ndarray,
        X: np.ndarray,
        Y: np.ndarray,
        params: PlantParameters,
        t: float = 0.0,
    ) -> "PlantState":
        """Build a state, overwriting incompatible boundary samples with a warning."""
        z = np.array(z, dtype=float)
        w = np.array(w, dtype=float)
        X = np.atleast_1d(np.array(X, dtype=float))
        Y = np.atleast_1d(np.array(Y, dtype=float))
        if X.size != params.m or Y.size != params.n:
            raise ContractViolation(
                "ODE state sizes must match (m, n)",
                details={"X": X.size, "Y": Y.size, "m": params.m, "n": params.n},
            )

        w_end, z_start = X[0], params.p * w[0]
        if w[-1] != w_end or z[0] != z_start:
            logger.warning(
                "boundary_samples_overwritten",
                w_end_given=float(w[-1]),
                w_end_used=float(w_end),
                z_start_given=float(z[0]),
                z_start_used=float(z_start),
            )
            w[-1] = w_end
            z[0] = params.p * w[0]
        return cls(t=float(t), z=z, w=w, X=X, Y=Y, step_index=0)

    @classmethod
    def zeros(cls, params: PlantParameters, Nx: int) -> "PlantState":
        return cls(
            t=0.0,
            z=np.zeros(Nx + 1),
            w=np.zeros(Nx + 1),
            X=np.zeros(params.m),
            Y=np.zeros(params.n),
        )

    def norm_sq(self) -> float:
        """||w||^2 + ||z||^2 + |X|^2 + |Y|^2 with trapezoid L2 norms."""
        weights = trapezoid_weights(self.z.size, 1.0 / self.Nx)
        return float(
            weights @ (self.z**2) + weights @ (self.w**2) + self.X @ self.X + self.Y @ self.Y
        )

    def is_finite(self) -> bool:
        return bool(
            np.all(np.isfinite(self.z))
            and np.all(np.isfinite(self.w))
            and np.all(np.isfinite(self.X))
            and np.all(np.isfinite(self.Y))
        )
