"""Pydantic models for scenario files."""

from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ThetaBoxConfig(_Section):
    """Known bounds of (d1, d2, b), each as [min, max]."""

    d1: List[float] = Field(..., min_length=2, max_length=2)
    d2: List[float] = Field(..., min_length=2, max_length=2)
    b: List[float] = Field(..., min_length=2, max_length=2)


class NonlinearityConfig(_Section):
    preset: Optional[str] = Field(None, description="Named rule set: paper or zero")
    expressions: Optional[List[str]] = Field(
        None, description="f_1..f_m as expressions in x1..xm"
    )

    @model_validator(mode="after")
    def one_source(self):
        if (self.preset is None) == (self.expressions is None):
            raise ValueError("give exactly one of preset or expressions")
        return self


class PlantConfig(_Section):
    q1: float = Field(..., gt=0, description="Transport speed of z")
    q2: float = Field(..., gt=0, description="Transport speed of w")
    d1: float = Field(..., description="In-domain coupling of w into z")
    d2: float = Field(..., description="In-domain coupling of z into w")
    p: float = Field(..., description="Boundary reflection z(0) = p w(0)")
    b: float = Field(..., gt=0, description="Input coefficient of the distal ODE")
    l: List[float] = Field(..., min_length=1, description="Last row of the companion matrix")
    M: List[float] = Field(..., min_length=1, description="Distal feedthrough into the last actuator equation")
    qbar: List[float] = Field(..., min_length=1, max_length=2, description="Boundary feedthrough coefficients")
    theta_box: ThetaBoxConfig
    nonlinearity: NonlinearityConfig = Field(default_factory=lambda: NonlinearityConfig(preset="zero"))

    @model_validator(mode="after")
    def matching_lengths(self):
        if len(self.M) != len(self.l):
            raise ValueError("M and l must have the same length")
        return self


class ProfileConfig(_Section):
    expression: Optional[str] = None
    preset: Optional[str] = None
    samples: Optional[List[float]] = None

    @model_validator(mode="after")
    def one_source(self):
        given = sum(v is not None for v in (self.expression, self.preset, self.samples))
        if given != 1:
            raise ValueError("give exactly one of expression, preset or samples")
        return self


class InitialConfig(_Section):
    z: ProfileConfig
    w: ProfileConfig
    X: List[float] = Field(..., min_length=1)
    Y: List[float] = Field(..., min_length=1)


class GainsConfig(_Section):
    mode: Literal["manual", "auto"] = "manual"
    kappas: List[float] = Field(..., min_length=1, description="kappa_1..kappa_n (kappa_n used as is in auto mode)")
    cs: List[float] = Field(..., min_length=1, max_length=2, description="c_1..c_m (c_m used as is in auto mode)")
    margin: float = Field(default=1.0, gt=0, description="Distance above the thresholds in auto mode")


class GridConfig(_Section):
    Nx: int = Field(..., ge=2, description="Number of cells")
    dt: float = Field(..., gt=0, description="Time step (s)")


class RunConfig(_Section):
    mode: Literal["open-loop", "nominal", "adaptive"] = "nominal"
    horizon: float = Field(default=20.0, gt=0, description="Simulated time (s)")
    seed: int = 0
    snapshot_every: int = Field(default=50, ge=1, description="Steps between field snapshots")
    diagnostics_every: Optional[int] = Field(None, ge=1, description="Steps between target-state reconstructions")
    strict_assumptions: bool = Field(default=True, description="Refuse to run on failed assumptions")


class IdentifierConfig(_Section):
    T: float = Field(default=1.5, gt=0, description="Trigger period (s)")
    Ntilde: int = Field(default=10, ge=1, description="Window depth in periods")
    modes: int = Field(default=1, ge=1, description="Number of sine modes enforced")
    pitch: float = Field(default=0.2, gt=0, description="Grid pitch of the feasible set")
    tolerance: float = Field(default=1e-4, gt=0, description="Relative residual tolerance of the feasible set")
    rank_tol: float = Field(default=1e-8, gt=0)
    hold_fraction: float = Field(default=0.05, ge=0)
    transport_quadrature: Literal["upwind", "cosine"] = "upwind"
    inner_quadrature: Literal["left", "trapezoid"] = "left"
    theta0: List[float] = Field(..., min_length=3, max_length=3, description="Initial estimate (d1, d2, b)")


class FilterConfig(_Section):
    cbar: Optional[float] = Field(None, description="Rate of the safe lower bound; defaults to c_m")
    excitation: bool = True
    eps_prop: float = Field(default=1e-6, gt=0)
    eps_abs: float = Field(default=1e-9, gt=0)
    eps_exc: float = Field(default=0.1, gt=0)


class OutputConfig(_Section):
    directory: str = "runs/default"
    full_snapshots: bool = Field(default=False, description="Snapshot every step")


class ScenarioConfig(_Section):
    """A complete run description as read from a scenario TOML file."""

    name: str = "scenario"
    plant: PlantConfig
    initial: InitialConfig
    gains: GainsConfig
    grid: GridConfig
    run: RunConfig = Field(default_factory=RunConfig)
    identifier: Optional[IdentifierConfig] = None
    filter: FilterConfig = Field(default_factory=FilterConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @field_validator("name")
    @classmethod
    def validate_name(cls, v):
        if not v.strip():
            raise ValueError("name must not be empty")
        return v.strip()

    @model_validator(mode="after")
    def adaptive_needs_identifier(self):
        if self.run.mode == "adaptive" and self.identifier is None:
            raise ValueError("adaptive mode needs an [identifier] section")
        return self
