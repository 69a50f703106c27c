"""Custom exception classes for safepde."""

from typing import Any, Dict, Optional


class SafePDEException(Exception):
    """Base exception for all safepde errors."""

    def __init__(
        self,
        message: str,
        code: str = "INTERNAL_ERROR",
        details: Optional[Dict[str, Any]] = None
    ):
        self.message = message
        self.code = code
        self.details = details or {}
        super().__init__(self.message)


# Contract Exceptions
class ContractViolation(SafePDEException):
    """Raised when an operation is called outside its precondition."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, code="CONTRACT_VIOLATION", details=details)


# Configuration Exceptions
class ConfigurationError(SafePDEException):
    """Base exception for rejected plant, gain or scenario configurations."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, code="CONFIGURATION_ERROR", details=details)


class ConfigSchemaError(ConfigurationError):
    """Raised when a scenario file violates the published schema."""

    def __init__(self, message: str, errors: Optional[list] = None, path: Optional[str] = None):
        super().__init__(message, details={"path": path, "errors": errors or []})
        self.code = "CONFIG_SCHEMA_ERROR"


class CFLViolation(ConfigurationError):
    """Raised when dt * max(q1, q2) > dx."""

    def __init__(self, dt: float, dx: float, speed: float):
        super().__init__(
            f"CFL rule dt*max(q1,q2) <= dx violated: {dt:g}*{speed:g} > {dx:g}",
            details={"dt": dt, "dx": dx, "max_speed": speed, "rule": "dt*max(q1,q2) <= dx"},
        )
        self.code = "CFL_VIOLATION"


class ThresholdViolation(ConfigurationError):
    """Raised when design gains fail their thresholds or a threshold is undefined."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details=details)
        self.code = "THRESHOLD_VIOLATION"


class NonHurwitzError(ConfigurationError):
    """Raised when the target ODE matrix is not Hurwitz (some kappa_i <= 0)."""

    def __init__(self, kappas):
        super().__init__(
            "target matrix A_Z is not Hurwitz; all kappa_i must be positive",
            details={"kappas": [float(k) for k in kappas]},
        )
        self.code = "NON_HURWITZ"


class AssumptionViolation(SafePDEException):
    """Raised when a run is started on initial data failing the standing assumptions."""

    def __init__(self, message: str, report: Optional[Dict[str, Any]] = None):
        super().__init__(message, code="ASSUMPTION_VIOLATION", details={"report": report or {}})


# Numerical Exceptions
class NumericFault(SafePDEException):
    """Raised when the state or a control term stops being finite."""

    def __init__(self, message: str, step_index: Optional[int] = None, term: Optional[str] = None):
        super().__init__(
            message,
            code="NUMERIC_FAULT",
            details={"step_index": step_index, "term": term},
        )


class KernelOracleError(SafePDEException):
    """Raised when the characteristics oracle fails to converge."""

    def __init__(self, sweeps: int, residual: float):
        super().__init__(
            f"kernel oracle did not converge after {sweeps} sweeps (residual {residual:.3e})",
            code="KERNEL_ORACLE_ERROR",
            details={"sweeps": sweeps, "residual": residual},
        )


# Identification / Safety Exceptions
class FeasibleSetEmptyError(SafePDEException):
    """Raised when pruning removes every candidate of the feasible set."""

    def __init__(self, trigger_time: float, tolerance: float):
        super().__init__(
            f"feasible set emptied at t={trigger_time:g}; residual tolerance {tolerance:g} "
            "is below the quadrature error",
            code="FEASIBLE_SET_EMPTY",
            details={"trigger_time": trigger_time, "tolerance": tolerance},
        )


class MissingContextError(SafePDEException):
    """Raised when a feasible triple has no controller context in the bank."""

    def __init__(self, theta):
        super().__init__(
            f"no controller context for theta={tuple(float(v) for v in theta)}",
            code="MISSING_CONTEXT",
            details={"theta": [float(v) for v in theta]},
        )


# Output Exceptions
class TraceWriteError(SafePDEException):
    """Raised when traces or summaries cannot be written."""

    def __init__(self, path: str, reason: str):
        super().__init__(
            f"failed to write {path}: {reason}",
            code="TRACE_WRITE_ERROR",
            details={"path": path, "reason": reason},
        )
