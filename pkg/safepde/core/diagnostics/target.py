"""Reconstruction of the target-system state (Z, alpha, beta, h) from a plant state."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from safepde.config import Settings, get_settings
from safepde.core.control.bank import ContextBank
from safepde.core.control.context import ControllerContext
from safepde.core.control.law import evaluate_law
from safepde.core.kernels.gains import target_transform
from safepde.core.kernels.oracle import KernelPairTable, alpha_kernel_oracle, psi_phi_oracle
from safepde.core.plant.state import PlantState
from safepde.core.quadrature import lower_triangular_trapezoid
from safepde.models.plant import PlantParameters
from safepde.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class TargetState:
    t: float
    Z: np.ndarray  # (n,)
    alpha: Optional[np.ndarray]  # None when p = 0 (no z-transformation kernels)
    beta: np.ndarray
    h: np.ndarray  # (m,)


def _on_grid(table: KernelPairTable, which: str, x: np.ndarray) -> np.ndarray:
    X, Yg = np.meshgrid(x, x, indexing="ij")
    return np.tril(table.sample(which, X, Yg))


class DiagnosticContext:
    """Full-triangle kernels for the true triple, sampled on the simulation grid.

    The x = 1 row of the weighted Psi and Phi is the controller's Gamma
    functional, so beta(1) = x1 - Gamma exactly.
    """

    def __init__(
        self,
        params: PlantParameters,
        controller: ControllerContext,
        settings: Optional[Settings] = None,
    ):
        self.params = params
        self.controller = controller
        self.bank = ContextBank.from_contexts([controller])
        settings = settings or get_settings()
        kernel = controller.kernel
        x = kernel.x
        self.x = x
        self.dx = float(x[1] - x[0])
        self.weights = lower_triangular_trapezoid(x.size, self.dx)
        self.T_Z = target_transform(controller.gains.kappas)
        self.lam = kernel.lambda_at
        self.gam = kernel.gamma_at

        resolution = settings.ORACLE_RESOLUTION
        pp = psi_phi_oracle(params, kernel.theta, kernel.K, resolution)
        self.Psi = _on_grid(pp, "K1", x)
        self.Phi = _on_grid(pp, "K2", x)
        self.Psi[-1] = kernel.psi1
        self.Phi[-1] = kernel.phi1
        self.WPsi = self.weights * self.Psi
        self.WPhi = self.weights * self.Phi
        self.WPsi[-1] = controller.z_coef[0]
        self.WPhi[-1] = controller.w_coef[0]

        if params.p != 0.0:
            ak = alpha_kernel_oracle(params, kernel.theta, kernel.K, resolution)
            self.varphi = _on_grid(ak, "K1", x)
            self.phi = _on_grid(ak, "K2", x)
            self.Wphi = self.weights * self.phi
            self.Wvarphi = self.weights * self.varphi
        else:
            logger.warning("alpha_transform_unavailable", reason="p = 0")
            self.varphi = self.phi = self.Wphi = self.Wvarphi = None
        logger.info("diagnostic_context_built", Nx=x.size - 1, oracle_resolution=resolution)


def forward_transform(state: PlantState, ctx: DiagnosticContext) -> TargetState:
    """Z by the g-chain, beta and alpha by Volterra quadrature, h by the law's chain."""
    z, w, Y = state.z, state.w, state.Y
    beta = w - ctx.WPsi @ z - ctx.WPhi @ w - ctx.lam @ Y
    if ctx.phi is not None:
        alpha = z - ctx.Wphi @ z - ctx.Wvarphi @ w - ctx.gam @ Y
    else:
        alpha = None
    h = evaluate_law(state, ctx.bank, ctx.params, ctx.controller.gains.c_m).h[0]
    return TargetState(t=state.t, Z=ctx.T_Z @ Y, alpha=alpha, beta=beta, h=np.array(h))
