"""Backstepping kernels."""

from safepde.core.kernels.context import KernelContext, build_kernel_context
from safepde.core.kernels.explicit import kernel_FH
from safepde.core.kernels.gains import gain_vector_K, lambda_gamma
from safepde.core.kernels.oracle import KernelPairTable, kernel_pde_oracle, solve_kernel_pair
from safepde.core.kernels.rows import KernelRow, psi_phi_row
from safepde.core.kernels.special import bessel_I, pi_function, pi_function_vec

__all__ = [
    "KernelContext",
    "KernelPairTable",
    "KernelRow",
    "bessel_I",
    "build_kernel_context",
    "gain_vector_K",
    "kernel_FH",
    "kernel_pde_oracle",
    "lambda_gamma",
    "pi_function",
    "pi_function_vec",
    "psi_phi_row",
    "solve_kernel_pair",
]
