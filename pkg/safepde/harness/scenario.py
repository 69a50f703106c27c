"""Scenario files: TOML parsing, schema validation and construction of run inputs."""

from __future__ import annotations

import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import numpy as np
from pydantic import ValidationError

from safepde.core.plant.nonlinearity import StrictFeedbackNonlinearity
from safepde.core.plant.profiles import ProfileSpec
from safepde.core.plant.state import PlantState
from safepde.exceptions import ConfigSchemaError, ConfigurationError
from safepde.models.plant import PlantParameters, SimGrid, ThetaBox
from safepde.models.scenario import ProfileConfig, ScenarioConfig
from safepde.utils.logger import get_logger

logger = get_logger(__name__)

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"

_HEADER = re.compile(r"^\s*\[\s*([A-Za-z0-9_.\-]+)\s*\]\s*(#.*)?$")
_KEY = re.compile(r"^\s*([A-Za-z0-9_\-]+)\s*=")


def locate_key(text: str, loc: tuple) -> Optional[int]:
    """1-based line of the key at ``loc`` (or of its section when the key is absent)."""
    keys = [str(part) for part in loc if not isinstance(part, int)]
    if not keys:
        return None
    section, key = ".".join(keys[:-1]), keys[-1]
    current = ""
    section_line = None
    for number, line in enumerate(text.splitlines(), start=1):
        header = _HEADER.match(line)
        if header:
            current = header.group(1)
            if current == section:
                section_line = number
            elif current == ".".join(keys):
                return number
            continue
        match = _KEY.match(line)
        if match and current == section and match.group(1) == key:
            return number
    if section_line is None and len(keys) > 1:
        # inline tables: fall back to the enclosing key
        return locate_key(text, tuple(keys[:-1]))
    return section_line


def _schema_errors(error: ValidationError, text: str) -> list[dict[str, Any]]:
    out = []
    for item in error.errors():
        loc = tuple(item.get("loc", ()))
        out.append({
            "field": ".".join(str(p) for p in loc) or "<root>",
            "line": locate_key(text, loc),
            "message": item.get("msg", ""),
            "type": item.get("type", ""),
        })
    return out


def check_scenario(config: ScenarioConfig) -> None:
    """Cross-field rules: the CFL rule and, for controlled runs, horizon >= 2/q2."""
    plant = config.plant
    SimGrid(config.grid.Nx, config.grid.dt).check_cfl(plant.q1, plant.q2)
    if config.run.mode != "open-loop" and config.run.horizon < 2.0 / plant.q2:
        raise ConfigurationError(
            "controlled runs need horizon >= 2/q2 so the control reaches the distal ODE",
            details={"horizon": config.run.horizon, "minimum": 2.0 / plant.q2},
        )


def parse_config_text(text: str, path: Optional[str] = None) -> ScenarioConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigSchemaError(
            f"scenario is not valid TOML: {e}",
            errors=[{"field": "<file>", "line": getattr(e, "lineno", None), "message": str(e)}],
            path=path,
        ) from e
    try:
        config = ScenarioConfig.model_validate(raw)
    except ValidationError as e:
        errors = _schema_errors(e, text)
        summary = "; ".join(
            f"{err['field']} (line {err['line']}): {err['message']}" if err["line"]
            else f"{err['field']}: {err['message']}"
            for err in errors
        )
        raise ConfigSchemaError(f"scenario schema violation: {summary}", errors=errors, path=path) from e
    check_scenario(config)
    return config


def resolve_config_path(path: str | Path) -> Path:
    """A path as given, or the name of a bundled scenario (``paper`` or ``paper.toml``)."""
    candidate = Path(path)
    if candidate.exists():
        return candidate
    bundled = SCENARIO_DIR / (candidate.name if candidate.suffix else f"{candidate.name}.toml")
    if bundled.exists():
        return bundled
    raise ConfigurationError(f"scenario file not found: {path}", details={"path": str(path)})


def parse_config(path: str | Path) -> ScenarioConfig:
    resolved = resolve_config_path(path)
    config = parse_config_text(resolved.read_text(encoding="utf-8"), path=str(resolved))
    logger.info("scenario_loaded", path=str(resolved), name=config.name, mode=config.run.mode)
    return config


def apply_overrides(
    config: ScenarioConfig,
    mode: Optional[str] = None,
    nx: Optional[int] = None,
    dt: Optional[float] = None,
    horizon: Optional[float] = None,
    seed: Optional[int] = None,
    out: Optional[str] = None,
) -> ScenarioConfig:
    """Copy with CLI overrides applied and revalidated."""
    data = config.model_dump()
    if mode is not None:
        data["run"]["mode"] = mode
    if nx is not None:
        data["grid"]["Nx"] = nx
    if dt is not None:
        data["grid"]["dt"] = dt
    if horizon is not None:
        data["run"]["horizon"] = horizon
    if seed is not None:
        data["run"]["seed"] = seed
    if out is not None:
        data["output"]["directory"] = out
    try:
        updated = ScenarioConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigSchemaError(
            "invalid command-line override",
            errors=[{"field": ".".join(map(str, err["loc"])), "line": None, "message": err["msg"]}
                    for err in e.errors()],
        ) from e
    check_scenario(updated)
    return updated


@dataclass(frozen=True)
class ScenarioInputs:
    params: PlantParameters
    grid: SimGrid
    state0: PlantState


def _profile(cfg: ProfileConfig) -> ProfileSpec:
    samples = tuple(cfg.samples) if cfg.samples is not None else None
    return ProfileSpec(expression=cfg.expression, preset=cfg.preset, samples=samples)


def build_plant(config: ScenarioConfig) -> PlantParameters:
    plant = config.plant
    box = plant.theta_box
    m = len(plant.qbar)
    rules = plant.nonlinearity
    nonlinearity = (
        StrictFeedbackNonlinearity.from_preset(rules.preset, m)
        if rules.preset is not None
        else StrictFeedbackNonlinearity(rules.expressions)
    )
    return PlantParameters(
        q1=plant.q1, q2=plant.q2, d1=plant.d1, d2=plant.d2, p=plant.p, b=plant.b,
        l=np.array(plant.l), M=np.array(plant.M), qbar=np.array(plant.qbar),
        nonlinearity=nonlinearity,
        theta_box=ThetaBox(box.d1[0], box.d1[1], box.d2[0], box.d2[1], box.b[0], box.b[1]),
    )


def build_inputs(config: ScenarioConfig) -> ScenarioInputs:
    params = build_plant(config)
    grid = SimGrid(Nx=config.grid.Nx, dt=config.grid.dt)
    x = grid.x
    init = config.initial
    state0 = PlantState.initial(
        z=_profile(init.z).sample(x),
        w=_profile(init.w).sample(x),
        X=np.array(init.X),
        Y=np.array(init.Y),
        params=params,
    )
    return ScenarioInputs(params=params, grid=grid, state0=state0)
