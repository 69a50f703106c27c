"""Process-wide numerical and logging settings using Pydantic settings."""

from functools import lru_cache

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Settings loaded from environment variables or an optional .env file.

    Scenario-specific values (plant, gains, grid, identifier) live in the
    scenario TOML; these are the knobs shared by every run.
    """

    # Logging Configuration
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "console"
    LOG_FILE: str = "logs/safepde.log"

    # Kernel numerics
    KERNEL_RESOLUTION: int = 100  # base y-samples of Psi(1,.), Phi(1,.)
    KERNEL_REFINEMENT: int = 4  # refinement factor for kernel derivatives
    PI_QUADRATURE_NODES: int = 48
    VOLTERRA_QUADRATURE_NODES: int = 32
    ORACLE_RESOLUTION: int = 100
    ORACLE_TOLERANCE: float = 1e-8
    ORACLE_MAX_SWEEPS: int = 200

    # Caches and search grids
    CONTEXT_CACHE_SIZE: int = 512
    THRESHOLD_B_POINTS: int = 50

    # Diagnostics
    TOL_FD_CONSTANT: float = 10.0
    DIAGNOSTICS_EVERY: int = 10

    model_config = SettingsConfigDict(
        env_file=".env", env_file_encoding="utf-8", case_sensitive=True, extra="ignore"
    )

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v):
        """Validate log level."""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        v_upper = v.upper()
        if v_upper not in valid_levels:
            raise ValueError(f"LOG_LEVEL must be one of {valid_levels}")
        return v_upper

    @field_validator("LOG_FORMAT")
    @classmethod
    def validate_log_format(cls, v):
        v_lower = v.lower()
        if v_lower not in ("json", "console"):
            raise ValueError("LOG_FORMAT must be 'json' or 'console'")
        return v_lower

    @field_validator(
        "KERNEL_RESOLUTION",
        "ORACLE_RESOLUTION",
        "PI_QUADRATURE_NODES",
        "VOLTERRA_QUADRATURE_NODES",
    )
    @classmethod
    def validate_resolution(cls, v):
        """Quadrature and table resolutions need a handful of points at least."""
        if v < 8:
            raise ValueError("resolutions and node counts must be >= 8")
        if v > 4000:
            raise ValueError("resolutions and node counts must be <= 4000")
        return v

    @field_validator("KERNEL_REFINEMENT")
    @classmethod
    def validate_refinement(cls, v):
        if not 1 <= v <= 16:
            raise ValueError("KERNEL_REFINEMENT must be between 1 and 16")
        return v

    @field_validator("ORACLE_TOLERANCE")
    @classmethod
    def validate_oracle_tolerance(cls, v):
        if not 0 < v < 1e-2:
            raise ValueError("ORACLE_TOLERANCE must be in (0, 1e-2)")
        return v

    @field_validator("ORACLE_MAX_SWEEPS", "CONTEXT_CACHE_SIZE", "DIAGNOSTICS_EVERY")
    @classmethod
    def validate_positive_count(cls, v):
        if v < 1:
            raise ValueError("value must be a positive integer")
        return v

    @field_validator("THRESHOLD_B_POINTS")
    @classmethod
    def validate_b_points(cls, v):
        if v < 2:
            raise ValueError("THRESHOLD_B_POINTS must be >= 2")
        return v

    @field_validator("TOL_FD_CONSTANT")
    @classmethod
    def validate_tol_constant(cls, v):
        if v <= 0:
            raise ValueError("TOL_FD_CONSTANT must be positive")
        return v


@lru_cache()
def get_settings() -> Settings:
    """
    Get cached settings instance.

    Returns:
        Settings: Application settings
    """
    return Settings()
