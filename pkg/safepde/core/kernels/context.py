"""Per-triple kernel context and the row cache shared across the Theta grid."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from cachetools import LRUCache

from safepde.config import Settings, get_settings
from safepde.core.kernels.explicit import kernel_FH
from safepde.core.kernels.gains import gain_vector_K, lambda_gamma
from safepde.core.kernels.rows import KernelRow, psi_phi_row
from safepde.models.plant import PlantParameters, Theta
from safepde.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class KernelContext:
    """Kernel samples for one parameter triple on the simulation grid ``x``."""

    theta: Theta
    K: np.ndarray
    x: np.ndarray
    row: KernelRow
    params: PlantParameters = field(repr=False)

    @property
    def psi1(self) -> np.ndarray:
        return self.row.psi

    @property
    def phi1(self) -> np.ndarray:
        return self.row.phi

    @property
    def psi1_dy(self) -> np.ndarray:
        return self.row.psi_dy

    @property
    def psi1_dyy(self) -> np.ndarray:
        return self.row.psi_dyy

    @property
    def phi1_dy(self) -> np.ndarray:
        return self.row.phi_dy

    @property
    def phi1_dyy(self) -> np.ndarray:
        return self.row.phi_dyy

    @cached_property
    def _lambda_gamma_at(self) -> tuple[np.ndarray, np.ndarray]:
        return lambda_gamma(self.x, self.params, self.K)

    @property
    def lambda_at(self) -> np.ndarray:
        return self._lambda_gamma_at[0]

    @property
    def gamma_at(self) -> np.ndarray:
        return self._lambda_gamma_at[1]

    @cached_property
    def lambda_one(self) -> np.ndarray:
        return lambda_gamma(1.0, self.params, self.K)[0]

    @cached_property
    def FH_tables(self) -> tuple[np.ndarray, np.ndarray]:
        """Closed-form F, H on the grid triangle (entries with j > i are zero)."""
        I, J = np.tril_indices(self.x.size)
        F, H = kernel_FH(self.x[I], self.x[J], self.params, self.theta)
        F_tab = np.zeros((self.x.size, self.x.size))
        H_tab = np.zeros_like(F_tab)
        F_tab[I, J] = F
        H_tab[I, J] = H
        return F_tab, H_tab

    @property
    def F_tab(self) -> np.ndarray:
        return self.FH_tables[0]

    @property
    def H_tab(self) -> np.ndarray:
        return self.FH_tables[1]


class KernelRowCache:
    """LRU cache of Psi/Phi rows.

    Rows depend on (d1, d2) and on lambda(.) B, which is independent of b once
    K has been divided by b, so every b of the Theta grid shares one entry.
    """

    def __init__(self, settings: Optional[Settings] = None):
        self._settings = settings or get_settings()
        self._cache: LRUCache = LRUCache(maxsize=self._settings.CONTEXT_CACHE_SIZE)
        self.hits = 0
        self.misses = 0

    @staticmethod
    def _key(params: PlantParameters, theta: Theta, K: np.ndarray, y_grid: np.ndarray) -> tuple:
        return (
            round(theta.d1, 12),
            round(theta.d2, 12),
            params.q1,
            params.q2,
            params.p,
            tuple(np.round(params.l, 12)),
            tuple(np.round(K * theta.b, 10)),
            y_grid.size,
        )

    def get(self, params: PlantParameters, theta: Theta, K: np.ndarray, y_grid: np.ndarray) -> KernelRow:
        key = self._key(params, theta, K, y_grid)
        if key in self._cache:
            self.hits += 1
            return self._cache[key]
        self.misses += 1
        row = psi_phi_row(params, theta, K, y_grid, settings=self._settings)
        self._cache[key] = row
        return row

    def __len__(self) -> int:
        return len(self._cache)


def build_kernel_context(
    params: PlantParameters,
    theta,
    kappas: Sequence[float],
    x_grid: np.ndarray,
    cache: Optional[KernelRowCache] = None,
) -> KernelContext:
    """Assemble K, lambda/gamma and the Psi/Phi rows for ``theta``."""
    theta = Theta.from_array(theta)
    K = gain_vector_K(params, kappas, b=theta.b)
    x_grid = np.asarray(x_grid, dtype=float)
    if cache is not None:
        row = cache.get(params, theta, K, x_grid)
    else:
        row = psi_phi_row(params, theta, K, x_grid)
    return KernelContext(theta=theta, K=K, x=x_grid, row=row, params=params)


def dump_kernel_tables(context, directory: str | Path) -> list[Path]:
    """Write Psi(1,.), Phi(1,.) and, for controller contexts, R_i and P_i."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    kernel = getattr(context, "kernel", context)
    paths = []
    rows = np.column_stack([kernel.x, kernel.psi1, kernel.phi1])
    path = out / "psi_phi_row.txt"
    np.savetxt(path, rows, fmt="%.17g", header="y psi phi")
    paths.append(path)
    for name, filename, header in (
        ("R_tab", "R_tables.txt", "rows R_0..R_m over y"),
        ("P_tab", "P_tables.txt", "rows P_0..P_m over y"),
        ("z_coef", "gamma_z_coefficients.txt", "rows Gamma..Gamma^(m) weights on z"),
        ("w_coef", "gamma_w_coefficients.txt", "rows Gamma..Gamma^(m) weights on w"),
    ):
        table = getattr(context, name, None)
        if table is not None:
            path = out / filename
            np.savetxt(path, table, fmt="%.17g", header=header)
            paths.append(path)
    logger.info("kernel_tables_dumped", directory=str(out), files=len(paths))
    return paths
