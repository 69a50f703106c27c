"""Scenario files, runs, traces and refinement studies."""

from safepde.harness.metrics import RunMetrics
from safepde.harness.refinement import RefinementTable, refinement_study, refinement_study_async
from safepde.harness.runner import RunResult, resolve_gains, run_scenario, tol_num
from safepde.harness.scenario import (
    ScenarioInputs,
    apply_overrides,
    build_inputs,
    build_plant,
    parse_config,
    parse_config_text,
    resolve_config_path,
)
from safepde.harness.traces import RunSummary, Snapshots, TraceRecord, TraceWriter, emit_traces, trace_columns

__all__ = [
    "RefinementTable",
    "RunMetrics",
    "RunResult",
    "RunSummary",
    "ScenarioInputs",
    "Snapshots",
    "TraceRecord",
    "TraceWriter",
    "apply_overrides",
    "build_inputs",
    "build_plant",
    "emit_traces",
    "parse_config",
    "parse_config_text",
    "refinement_study",
    "refinement_study_async",
    "resolve_config_path",
    "resolve_gains",
    "run_scenario",
    "tol_num",
    "trace_columns",
]
