"""Scenario execution in open-loop, nominal or adaptive mode."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from safepde.config import Settings, get_settings
from safepde.core.control import ContextStore, auto_gains, check_c_thresholds, check_kappa_thresholds
from safepde.core.control.law import evaluate_law
from safepde.core.control.thresholds import require_cs, require_kappas, robust_kappa_thresholds
from safepde.core.diagnostics import (
    DiagnosticContext,
    MonitorSeries,
    decay_check,
    forward_transform,
    lyapunov_rate,
    lyapunov_V,
    safety_monitor,
)
from safepde.core.identification import BaLSIEstimator, TriggerSchedule
from safepde.core.kernels.gains import target_transform
from safepde.core.plant import PlantState, predict_Y_free, step, validate
from safepde.core.safety import ExcitationMonitor, SafetyFilter
from safepde.exceptions import AssumptionViolation, FeasibleSetEmptyError, NumericFault
from safepde.harness.metrics import RunMetrics
from safepde.harness.scenario import ScenarioInputs, build_inputs
from safepde.harness.traces import RunSummary, Snapshots, TraceRecord, emit_traces
from safepde.models.plant import GainConfig, PlantParameters, SimGrid
from safepde.models.scenario import ScenarioConfig
from safepde.utils.logger import get_logger, log_run_event

logger = get_logger(__name__)


@dataclass
class RunResult:
    config: ScenarioConfig
    records: list[TraceRecord]
    snapshots: Snapshots
    summary: RunSummary
    metrics: RunMetrics
    final_state: PlantState
    paths: list[Path] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        """Scalar column by trace name (y1, x2, h1, Z1, Ua, d1hat, ...), NaN where blank."""
        vector = {"y": "Y", "x": "X", "h": "h", "Z": "Z"}
        out = []
        for r in self.records:
            if name[0] in vector and name[1:].isdigit():
                values = getattr(r, vector[name[0]])
                out.append(np.nan if values is None else values[int(name[1:]) - 1])
            elif name in ("d1hat", "d2hat", "bhat"):
                k = ("d1hat", "d2hat", "bhat").index(name)
                out.append(np.nan if r.theta_hat is None else r.theta_hat[k])
            else:
                value = getattr(r, name)
                out.append(np.nan if value is None else value)
        return np.array(out, dtype=float)


def tol_num(grid: SimGrid, settings: Optional[Settings] = None) -> float:
    settings = settings or get_settings()
    return settings.TOL_FD_CONSTANT * max(grid.dx, grid.dt)


def resolve_gains(config: ScenarioConfig, inputs: ScenarioInputs) -> GainConfig:
    """Manual gains checked against their thresholds, or auto gains above them."""
    params, grid, state0 = inputs.params, inputs.grid, inputs.state0
    g = config.gains
    cbar = config.filter.cbar
    adaptive = config.run.mode == "adaptive"
    pitch = config.identifier.pitch if config.identifier else 0.2

    if g.mode == "auto":
        defaults = GainConfig(kappas=tuple(g.kappas), cs=tuple(max(c, 2.5) for c in g.cs[:-1]) + (g.cs[-1],))
        defaults.check_dimensions(params.n, params.m)
        kappa_thresholds = None
        candidates = None
        if adaptive:
            kappa_thresholds = lambda ks: robust_kappa_thresholds(params, state0, ks, pitch)
            candidates = params.theta_box.grid(pitch)
        gains = auto_gains(params, state0, grid, defaults, candidates, g.margin, kappa_thresholds)
        if cbar is not None:
            gains = GainConfig(kappas=gains.kappas, cs=gains.cs, cbar=cbar)
        return gains

    gains = GainConfig(kappas=tuple(g.kappas), cs=tuple(g.cs), cbar=cbar)
    gains.check_dimensions(params.n, params.m)
    if config.run.strict_assumptions and config.run.mode != "open-loop":
        Y_at = predict_Y_free(state0, params).at_end()
        require_kappas(gains.kappas, check_kappa_thresholds(params, Y_at, gains.kappas))
        store = ContextStore(params, gains, grid)
        require_cs(gains.cs, check_c_thresholds(params, state0, store.bank([params.theta])))
    return gains


def _series(records: list[TraceRecord], n: int, m: int) -> MonitorSeries:
    nan_m, nan_n = np.full(m, np.nan), np.full(n, np.nan)
    return MonitorSeries(
        t=np.array([r.t for r in records]),
        y1=np.array([r.Y[0] for r in records]),
        norm_sq=np.array([r.norm_sq for r in records]),
        h=np.array([r.h if r.h is not None else nan_m for r in records]).reshape(len(records), m),
        Z=np.array([r.Z if r.Z is not None else nan_n for r in records]).reshape(len(records), n),
        beta_min=np.array([np.nan if r.beta_min is None else r.beta_min for r in records]),
        V=np.array([np.nan if r.V is None else r.V for r in records]),
    )


def run_scenario(
    config: ScenarioConfig,
    write: bool = True,
    diagnostics: bool = True,
    settings: Optional[Settings] = None,
) -> RunResult:
    """Run ``config`` end to end; faults end the run with a partial trace and a fault record."""
    settings = settings or get_settings()
    started = time.perf_counter()
    mode = config.run.mode
    inputs = build_inputs(config)
    params: PlantParameters = inputs.params
    grid: SimGrid = inputs.grid
    state = inputs.state0
    n, m = params.n, params.m
    controlled = mode != "open-loop"
    log_run_event(logger, "run_started", name=config.name, mode=mode, Nx=grid.Nx, dt=grid.dt,
                  horizon=config.run.horizon, seed=config.run.seed)

    gains = resolve_gains(config, inputs)
    report = validate(params, state, grid, gains.kappas)
    if controlled and config.run.strict_assumptions and not report.passed:
        failed = [c.name for c in report.failures()]
        raise AssumptionViolation(f"initial data fail assumptions: {', '.join(failed)}", report.as_dict())

    metrics = RunMetrics(mode)
    snapshots = Snapshots(x=grid.x)
    records: list[TraceRecord] = []
    every = 1 if config.output.full_snapshots else config.run.snapshot_every
    diag_every = config.run.diagnostics_every or settings.DIAGNOSTICS_EVERY

    store = safety = estimator = excitation = diag = lyap = None
    true_bank = None
    T_Z = target_transform(gains.kappas)
    if controlled:
        store = ContextStore(params, gains, grid, settings)
        true_bank = store.bank([params.theta])
        safety = SafetyFilter(store, params, gains.cbar)
        if mode == "adaptive":
            ident = config.identifier
            schedule = TriggerSchedule(ident.T, ident.Ntilde)
            estimator = BaLSIEstimator(
                params, grid, ident.theta0, schedule,
                modes=ident.modes, pitch=ident.pitch, tolerance=ident.tolerance,
                rank_tol=ident.rank_tol, hold_fraction=ident.hold_fraction,
                transport_quadrature=ident.transport_quadrature,
                inner_quadrature=ident.inner_quadrature,
            )
            excitation = ExcitationMonitor(
                params, schedule, grid.dt,
                eps_prop=config.filter.eps_prop, eps_abs=config.filter.eps_abs,
                eps_exc=config.filter.eps_exc, enabled=config.filter.excitation,
            )
        if diagnostics:
            diag = DiagnosticContext(params, true_bank.contexts[0], settings)
            b_bound = params.theta_box.b_max if mode == "adaptive" else None
            lyap = lyapunov_rate(params, gains, b=b_bound)

    n_steps = int(round(config.run.horizon / grid.dt))
    fault = None
    hat_key, hat_bank = None, None
    for k in range(n_steps + 1):
        tick = time.perf_counter()
        try:
            record = TraceRecord(t=state.t, Y=state.Y.copy(), X=state.X.copy(), U=0.0,
                                 norm_sq=state.norm_sq())
            if controlled:
                nominal = evaluate_law(state, true_bank, params, gains.c_m)
                record.h = nominal.h[0]
                if estimator is not None:
                    estimator.observe(state)
                    if estimator.maybe_trigger(state) is not None:
                        metrics.trigger()
                        if estimator.t_f is not None and excitation.enabled:
                            excitation.deactivate()
                    theta_hat = estimator.theta_hat
                    if hat_key != theta_hat:
                        hat_key, hat_bank = theta_hat, store.bank([theta_hat])
                    U_d = float(evaluate_law(state, hat_bank, params, gains.c_m).U[0])
                    feasible = estimator.feasible
                else:
                    theta_hat = params.theta
                    U_d = float(nominal.U[0])
                    feasible = np.atleast_2d(params.theta.as_array())
                outcome = safety.apply(state, U_d, feasible)
                exc = excitation(state).amount if excitation is not None else 0.0
                if excitation is not None:
                    excitation.record_input(outcome.U_a)
                record.U = outcome.U_a + exc
                record.Ud, record.Ua = U_d, outcome.U_a
                record.cmax = outcome.bound.c_max
                record.filter_active = outcome.active
                record.excitation = exc
                record.u_gap = float(nominal.U[0]) - U_d
                record.theta_hat = tuple(theta_hat)
                record.D_size = len(feasible)
                if k % diag_every == 0:
                    record.Z = T_Z @ state.Y
                if diag is not None and k % diag_every == 0:
                    target = forward_transform(state, diag)
                    record.V = lyapunov_V(target, lyap)
                    record.beta_min = float(np.min(target.beta))
            records.append(record)
            if k % every == 0:
                snapshots.add(state.t, state.z, state.w)
            if k == n_steps:
                break
            state = step(state, record.U, params, grid)
        except (NumericFault, FeasibleSetEmptyError) as e:
            fault = {"code": e.code, "message": e.message, "step_index": state.step_index,
                     "t": state.t, "details": {k_: str(v) for k_, v in e.details.items()}}
            log_run_event(logger, "run", success=False, error=e.message, code=e.code,
                          step_index=state.step_index)
            break
        metrics.step(time.perf_counter() - tick, record.filter_active, record.excitation > 0)

    series = _series(records, n, m)
    margins = safety_monitor(series, params.q2, tol_num(grid, settings))
    t_f = estimator.t_f if estimator is not None else (0.0 if controlled else None)
    decay = None
    if lyap is not None and t_f is not None:
        decay = decay_check(series.t, series.V, t_f, lyap.sigma0, params.q2)

    summary = RunSummary(
        name=config.name,
        mode=mode,
        seed=config.run.seed,
        steps=max(len(records) - 1, 0),
        horizon=config.run.horizon,
        Nx=grid.Nx,
        dt=grid.dt,
        t_f=t_f,
        theta_true=list(params.theta),
        theta_final=list(estimator.theta_hat) if estimator is not None else None,
        estimate_history=[r.as_dict() for r in estimator.state.history] if estimator else [],
        excitation_injections=[
            {"start": s, "end": e, "reason": why} for s, e, why in excitation.injections
        ] if excitation is not None else [],
        margins=margins.as_dict(),
        decay=None if decay is None else {
            "passed": decay.passed, "checked": decay.checked,
            "worst_ratio": decay.worst_ratio, "slack": decay.slack,
        },
        lyapunov=None if lyap is None else {
            "a0": lyap.a0, "r": lyap.r, "sigma0": lyap.sigma0, "xi1": lyap.xi1, "xi2": lyap.xi2,
        },
        gains={"kappas": list(gains.kappas), "cs": list(gains.cs), "cbar": gains.cbar},
        validation=report.as_dict(),
        initial_norm_sq=float(series.norm_sq[0]) if records else 0.0,
        final_norm_sq=float(series.norm_sq[-1]) if records else 0.0,
        diverged=margins.diverged,
        fault=fault,
        wall_clock_seconds=time.perf_counter() - started,
    )
    result = RunResult(config=config, records=records, snapshots=snapshots, summary=summary,
                       metrics=metrics, final_state=state)
    if write:
        result.paths = emit_traces(records, config.output.directory, n, m, snapshots, summary, metrics)
    log_run_event(logger, "run_completed", name=config.name, mode=mode, faulted=fault is not None,
                  steps=summary.steps, t_f=t_f, safe=margins.safe, diverged=margins.diverged,
                  seconds=round(summary.wall_clock_seconds, 3))
    return result
