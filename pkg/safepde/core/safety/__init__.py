"""Safe lower bound, QP filter and excitation monitoring."""

from safepde.core.safety.bound import SafeActionBound, safe_lower_bound
from safepde.core.safety.excitation import ExcitationDecision, ExcitationMonitor
from safepde.core.safety.filter import FilterOutcome, SafetyFilter, qp_filter

__all__ = [
    "ExcitationDecision",
    "ExcitationMonitor",
    "FilterOutcome",
    "SafeActionBound",
    "SafetyFilter",
    "qp_filter",
    "safe_lower_bound",
]
