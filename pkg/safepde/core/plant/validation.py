"""Checks of the standing assumptions on plant parameters and initial data.

A report never raises on a failed assumption; callers decide (the harness
raises AssumptionViolation in strict mode).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from safepde.core.kernels.context import build_kernel_context
from safepde.core.plant.free_response import predict_Y_free
from safepde.core.plant.state import PlantState
from safepde.core.quadrature import upwind_weights
from safepde.exceptions import CFLViolation, ContractViolation
from safepde.models.plant import PlantParameters, SimGrid


@dataclass
class AssumptionCheck:
    name: str
    passed: Optional[bool]
    detail: str = ""
    where: Optional[float] = None
    value: Optional[float] = None


@dataclass
class ValidationReport:
    checks: list[AssumptionCheck] = field(default_factory=list)

    def add(self, name: str, passed: Optional[bool], detail: str = "", where=None, value=None) -> None:
        """Record a check; numpy results are stored as plain bool and float."""
        self.checks.append(AssumptionCheck(
            name=name,
            passed=None if passed is None else bool(passed),
            detail=detail,
            where=None if where is None else float(where),
            value=None if value is None else float(value),
        ))

    @property
    def passed(self) -> bool:
        """True when no check failed; skipped checks (None) do not count."""
        return all(c.passed is not False for c in self.checks)

    def failures(self) -> list[AssumptionCheck]:
        return [c for c in self.checks if c.passed is False]

    def get(self, name: str) -> AssumptionCheck:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {"passed": self.passed, "checks": [asdict(c) for c in self.checks]}


def closed_form_kernels_applicable(params: PlantParameters, theta=None) -> tuple[bool, str]:
    d1, d2 = (params.d1, params.d2) if theta is None else (theta[0], theta[1])
    if d1 == 0.0 and d2 == 0.0:
        return True, "uncoupled transport"
    if params.p == 0.0:
        return False, "p = 0 makes the closed-form kernels singular"
    if d1 * d2 < 0.0 or params.p * d2 < 0.0 or d1 / params.p < 0.0:
        return False, "closed forms need d1*d2 >= 0, p*d2 >= 0, d1/p >= 0"
    return True, "closed forms applicable"


def validate(
    params: PlantParameters,
    state0: PlantState,
    grid: SimGrid,
    kappas: Optional[Sequence[float]] = None,
) -> ValidationReport:
    """Evaluate grid, boundary and the four standing assumptions.

    The actuator-state assumption needs the distal gains (they fix K); it is
    reported as skipped when ``kappas`` is None.
    """
    report = ValidationReport()

    try:
        grid.check_cfl(params.q1, params.q2)
        report.add("cfl", True, "dt*max(q1,q2) <= dx")
    except CFLViolation as e:
        report.add("cfl", False, e.message)

    shape_ok = state0.z.size == grid.Nx + 1 and state0.X.size == params.m and state0.Y.size == params.n
    report.add("state_shape", shape_ok, f"Nx+1={grid.Nx + 1}, z={state0.z.size}, m={params.m}, n={params.n}")

    compatible = bool(state0.z[0] == params.p * state0.w[0] and state0.w[-1] == state0.X[0])
    report.add("boundary_compatibility", compatible, "z(0)=p w(0), w(1)=x1")

    f0 = params.nonlinearity.evaluate(np.zeros(params.m))
    report.add("nonlinearity_origin", bool(np.all(f0 == 0.0)), "f_j(0) = 0")

    in_box = params.theta_box.contains(params.theta)
    report.add("theta_in_box", in_box, f"theta={tuple(params.theta)}")

    y1 = float(state0.Y[0])
    report.add("distal_initial_sign", y1 >= 0.0, "y1(0) >= 0", value=y1)

    applicable, reason = closed_form_kernels_applicable(params)
    report.add("kernel_applicability", applicable, reason)
    if not applicable:
        report.add("distal_free_response", None, "skipped: " + reason)
        report.add("actuator_initial_margin", None, "skipped: " + reason)
        return report

    free = predict_Y_free(state0, params)
    y1_traj = free.Y[:, 0]
    interior = y1_traj[1:-1]
    end = float(y1_traj[-1])
    if interior.size and float(np.min(interior)) < 0.0:
        k = int(np.argmin(interior)) + 1
        report.add(
            "distal_free_response", False, "y1 must stay >= 0 before 1/q2",
            where=float(free.t[k] * params.q2), value=float(y1_traj[k]),
        )
    elif end <= 0.0:
        report.add(
            "distal_free_response", False, "y1(1/q2) must be > 0",
            where=1.0, value=end,
        )
    else:
        report.add("distal_free_response", True, "y1 >= 0 on [0,1/q2), y1(1/q2) > 0", value=end)

    if kappas is None:
        report.add("actuator_initial_margin", None, "skipped: no distal gains given")
        return report
    try:
        ctx = build_kernel_context(params, params.theta, kappas, grid.x)
    except ContractViolation as e:
        report.add("actuator_initial_margin", None, "skipped: " + e.message)
        return report
    wz, ww = upwind_weights(grid.Nx + 1, grid.dx)
    gamma0 = float(wz @ (ctx.psi1 * state0.z) + ww @ (ctx.phi1 * state0.w) + ctx.lambda_one @ state0.Y)
    margin = float(state0.X[0]) - gamma0
    report.add("actuator_initial_margin", margin > 0.0, "x1(0) > Gamma(0)", value=margin)
    return report
