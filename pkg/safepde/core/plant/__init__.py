"""Plant simulation."""

from safepde.core.plant.boundary import BoundaryDerivatives, boundary_time_derivatives
from safepde.core.plant.free_response import FreeResponse, predict_Y_free
from safepde.core.plant.simulator import step, transport_rhs
from safepde.core.plant.state import PlantState
from safepde.core.plant.validation import ValidationReport, validate

__all__ = [
    "BoundaryDerivatives",
    "FreeResponse",
    "PlantState",
    "ValidationReport",
    "boundary_time_derivatives",
    "predict_Y_free",
    "step",
    "transport_rhs",
    "validate",
]
