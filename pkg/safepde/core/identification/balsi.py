"""Triggered batch least-squares identifier driving estimate and feasible-set updates."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from safepde.core.identification.accumulators import TransportQuadrature, WindowAccumulators
from safepde.core.identification.estimator import EstimateUpdate, update_estimate
from safepde.core.identification.feasible_set import FeasibleSet, update_feasible_set
from safepde.core.identification.fermat import FermatSystem, InnerQuadrature, assemble_fermat
from safepde.core.identification.schedule import TriggerSchedule
from safepde.core.plant.state import PlantState
from safepde.models.plant import PlantParameters, SimGrid, Theta, ThetaBox
from safepde.utils.logger import get_logger, log_trigger

logger = get_logger(__name__)


@dataclass(frozen=True)
class TriggerRecord:
    index: int
    t: float
    mu: float
    theta_hat: Theta
    feasible_size: int
    held: bool
    d_rank: int
    b_identified: bool
    latched: bool

    def as_dict(self) -> dict:
        return {
            "index": self.index,
            "t": self.t,
            "mu": self.mu,
            "theta_hat": list(self.theta_hat),
            "feasible_size": self.feasible_size,
            "held": self.held,
            "d_rank": self.d_rank,
            "b_identified": self.b_identified,
            "latched": self.latched,
        }


@dataclass
class EstimatorState:
    theta_hat: Theta
    feasible: FeasibleSet
    t_f: Optional[float] = None
    history: list[TriggerRecord] = field(default_factory=list)


class BaLSIEstimator:
    """Collects window functionals every step and updates (theta_hat, D) at t_i = i T.

    Once the estimate is exact (full-rank (d1, d2) block and Q4 above the
    rank threshold) the identification time t_f latches; later triggers are
    recorded but leave theta_hat and D unchanged.
    """

    def __init__(
        self,
        params: PlantParameters,
        grid: SimGrid,
        theta0,
        schedule: TriggerSchedule,
        modes: int = 1,
        pitch: float = 0.2,
        tolerance: float = 1e-4,
        rank_tol: float = 1e-8,
        hold_fraction: float = 0.05,
        transport_quadrature: TransportQuadrature = "upwind",
        inner_quadrature: InnerQuadrature = "left",
    ):
        self.params = params
        self.grid = grid
        self.box: ThetaBox = params.theta_box
        self.schedule = schedule
        self.modes = modes
        self.rank_tol = rank_tol
        self.hold_fraction = hold_fraction
        self.inner_quadrature = inner_quadrature
        self.accumulators = WindowAccumulators(params, grid.Nx, modes, transport_quadrature)

        theta0 = self.box.project(theta0)
        initial = FeasibleSet.initial(self.box, pitch, tolerance)
        points = initial.points
        if not initial.contains(theta0):
            points = np.vstack([points, theta0.as_array()])
        self.state = EstimatorState(
            theta_hat=theta0,
            feasible=FeasibleSet(points=points, systems=(), tolerance=tolerance),
        )
        self._index = 0

    @property
    def theta_hat(self) -> Theta:
        return self.state.theta_hat

    @property
    def feasible(self) -> FeasibleSet:
        return self.state.feasible

    @property
    def t_f(self) -> Optional[float]:
        return self.state.t_f

    @property
    def next_trigger_step(self) -> int:
        t_next, _ = self.schedule.schedule(self._index)
        return self.schedule.step_index(t_next, self.grid.dt)

    def observe(self, state: PlantState) -> None:
        self.accumulators.accumulate(state)

    def systems(self, t_next: float, mu: float) -> list[FermatSystem]:
        dt = self.grid.dt
        window = self.accumulators.window(
            self.schedule.step_index(mu, dt), self.schedule.step_index(t_next, dt)
        )
        return [assemble_fermat(window, n, self.inner_quadrature) for n in range(1, self.modes + 1)]

    def maybe_trigger(self, state: PlantState) -> Optional[TriggerRecord]:
        """Process the trigger due at ``state``'s step, if any."""
        if state.step_index != self.next_trigger_step:
            return None
        i = self._index
        t_next, mu = self.schedule.schedule(i)
        self._index += 1

        if self.state.t_f is not None:
            record = TriggerRecord(
                index=i + 1, t=t_next, mu=mu, theta_hat=self.state.theta_hat,
                feasible_size=len(self.state.feasible), held=True, d_rank=2,
                b_identified=True, latched=True,
            )
        else:
            systems = self.systems(t_next, mu)
            update: EstimateUpdate = update_estimate(
                systems, self.state.theta_hat, self.box, self.rank_tol, self.hold_fraction
            )
            # an informative window latches the exact candidate, never a held value
            theta_new = update.candidate if update.exact else update.theta
            offered = np.vstack([update.candidate.as_array(), theta_new.as_array()])
            self.state.feasible = update_feasible_set(
                systems, self.state.feasible, self.box, offered=offered, trigger_time=t_next,
                collapse=update.exact,
            )
            self.state.theta_hat = theta_new
            if update.exact:
                self.state.t_f = t_next
            record = TriggerRecord(
                index=i + 1, t=t_next, mu=mu, theta_hat=theta_new,
                feasible_size=len(self.state.feasible), held=update.held and not update.exact,
                d_rank=update.d_rank, b_identified=update.b_identified,
                latched=update.exact,
            )

        self.state.history.append(record)
        log_trigger(
            logger, record.t, record.mu, record.theta_hat, record.feasible_size, record.held,
            d_rank=record.d_rank, b_identified=record.b_identified, t_f=self.state.t_f,
        )
        _, mu_next = self.schedule.schedule(self._index)
        self.accumulators.discard_before(self.schedule.step_index(mu_next, self.grid.dt))
        return record
