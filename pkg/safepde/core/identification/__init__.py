"""Batch least-squares identification of (d1, d2, b)."""

from safepde.core.identification.accumulators import WindowAccumulators, WindowSeries
from safepde.core.identification.balsi import BaLSIEstimator, EstimatorState, TriggerRecord
from safepde.core.identification.estimator import EstimateUpdate, update_estimate
from safepde.core.identification.feasible_set import FeasibleSet, update_feasible_set
from safepde.core.identification.fermat import FermatSystem, assemble_fermat
from safepde.core.identification.schedule import TriggerSchedule

__all__ = [
    "BaLSIEstimator",
    "EstimateUpdate",
    "EstimatorState",
    "FeasibleSet",
    "FermatSystem",
    "TriggerRecord",
    "TriggerSchedule",
    "WindowAccumulators",
    "WindowSeries",
    "assemble_fermat",
    "update_estimate",
    "update_feasible_set",
]
