"""Nominal output-positive controller."""

from safepde.core.control.bank import ContextBank, ContextStore
from safepde.core.control.context import ControllerContext, build_context
from safepde.core.control.law import LawEvaluation, control_U, evaluate_law, gamma_derivs
from safepde.core.control.thresholds import (
    auto_gains,
    check_c_thresholds,
    check_kappa_thresholds,
    robust_kappa_thresholds,
)

__all__ = [
    "ContextBank",
    "ContextStore",
    "ControllerContext",
    "LawEvaluation",
    "auto_gains",
    "build_context",
    "check_c_thresholds",
    "check_kappa_thresholds",
    "control_U",
    "evaluate_law",
    "gamma_derivs",
    "robust_kappa_thresholds",
]
