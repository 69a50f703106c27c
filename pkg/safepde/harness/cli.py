"""
Command-line entry point.

    python -m safepde.harness.cli simulate --config paper --mode adaptive --out runs/paper
    python -m safepde.harness.cli refine --config pure_transport --levels 3
    python -m safepde.harness.cli validate --config scenarios/custom.toml
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from typing import Optional, Sequence

from dotenv import load_dotenv

from safepde.exceptions import ConfigSchemaError, SafePDEException
from safepde.harness.refinement import refinement_study_async
from safepde.harness.runner import run_scenario
from safepde.harness.scenario import apply_overrides, build_inputs, parse_config
from safepde.core.plant import validate as validate_plant
from safepde.utils.logger import configure_logging, get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def _simulate(args: argparse.Namespace) -> int:
    config = apply_overrides(
        parse_config(args.config),
        mode=args.mode, nx=args.nx, dt=args.dt, horizon=args.horizon, seed=args.seed, out=args.out,
    )
    result = run_scenario(config)
    summary = result.summary
    print(json.dumps({
        "name": summary.name,
        "mode": summary.mode,
        "steps": summary.steps,
        "t_f": summary.t_f,
        "theta_final": summary.theta_final,
        "safe": summary.margins.get("safe"),
        "diverged": summary.diverged,
        "initial_norm_sq": summary.initial_norm_sq,
        "final_norm_sq": summary.final_norm_sq,
        "fault": summary.fault,
        "files": [str(p) for p in result.paths],
    }, indent=2))
    return EXIT_FAILED if summary.fault is not None else EXIT_OK


def _refine(args: argparse.Namespace) -> int:
    config = parse_config(args.config)
    table = asyncio.run(refinement_study_async(config, args.levels))
    print(json.dumps(table.as_dict(), indent=2))
    return EXIT_OK


def _validate(args: argparse.Namespace) -> int:
    config = parse_config(args.config)
    inputs = build_inputs(config)
    report = validate_plant(inputs.params, inputs.state0, inputs.grid, tuple(config.gains.kappas))
    print(json.dumps({"name": config.name, "mode": config.run.mode, "assumptions": report.as_dict()}, indent=2))
    return EXIT_OK if report.passed else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="safepde", description="Safe adaptive boundary control of sandwich hyperbolic PDEs")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Run a scenario and write its traces")
    sim.add_argument("--config", required=True, help="Scenario TOML file or bundled scenario name")
    sim.add_argument("--mode", choices=["open-loop", "nominal", "adaptive"], default=None,
                     help="Override run.mode")
    sim.add_argument("--out", type=str, default=None, help="Output directory (overrides output.directory)")
    sim.add_argument("--nx", type=int, default=None, help="Number of cells")
    sim.add_argument("--dt", type=float, default=None, help="Time step (s)")
    sim.add_argument("--horizon", type=float, default=None, help="Simulated time (s)")
    sim.add_argument("--seed", type=int, default=None, help="Recorded run seed")
    sim.set_defaults(handler=_simulate)

    ref = sub.add_parser("refine", help="Grid-refinement study")
    ref.add_argument("--config", required=True, help="Scenario TOML file or bundled scenario name")
    ref.add_argument("--levels", type=int, default=3, help="Refinement levels (>= 2)")
    ref.set_defaults(handler=_refine)

    val = sub.add_parser("validate", help="Check a scenario against the schema and the standing assumptions")
    val.add_argument("--config", required=True, help="Scenario TOML file or bundled scenario name")
    val.set_defaults(handler=_validate)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigSchemaError as e:
        logger.error("scenario_rejected", code=e.code, errors=e.details.get("errors"), path=e.details.get("path"))
        print(json.dumps({"error": e.code, "message": e.message, "details": e.details}, indent=2, default=str),
              file=sys.stderr)
        return EXIT_CONFIG
    except SafePDEException as e:
        logger.error("command_failed", command=args.command, code=e.code, message=e.message)
        print(json.dumps({"error": e.code, "message": e.message, "details": e.details}, indent=2, default=str),
              file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
