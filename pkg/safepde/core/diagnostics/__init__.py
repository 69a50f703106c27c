"""Target-state reconstruction, Lyapunov analytics and safety monitoring."""

from safepde.core.diagnostics.lyapunov import LyapunovConfig, lyapunov_rate, lyapunov_V, xi_norm
from safepde.core.diagnostics.monitor import (
    DecayReport,
    MarginsReport,
    MonitorSeries,
    decay_check,
    safety_monitor,
)
from safepde.core.diagnostics.target import DiagnosticContext, TargetState, forward_transform

__all__ = [
    "DecayReport",
    "DiagnosticContext",
    "LyapunovConfig",
    "MarginsReport",
    "MonitorSeries",
    "TargetState",
    "decay_check",
    "forward_transform",
    "lyapunov_V",
    "lyapunov_rate",
    "safety_monitor",
    "xi_norm",
]
