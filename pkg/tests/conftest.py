"""Shared fixtures for the test suite."""

import numpy as np
import pytest

from safepde.config import Settings
from safepde.core.plant.nonlinearity import StrictFeedbackNonlinearity
from safepde.core.plant.profiles import ProfileSpec
from safepde.core.plant.state import PlantState
from safepde.models.plant import GainConfig, PlantParameters, SimGrid, ThetaBox


PAPER_THETA = (0.8, 1.0, 1.0)


def make_settings(**overrides) -> Settings:
    """Settings with code defaults + overrides, never reading a real .env."""

    class TestSettings(Settings):
        model_config = Settings.model_config.copy()
        model_config["env_file"] = None

    return TestSettings(**overrides)


def make_paper_params(**overrides) -> PlantParameters:
    values = dict(
        q1=1.0, q2=1.0, d1=0.8, d2=1.0, p=1.0, b=1.0,
        l=np.array([1.0, -0.5]), M=np.array([0.1, 0.3]), qbar=np.array([1.0, 1.0]),
        nonlinearity=StrictFeedbackNonlinearity.from_preset("paper", 2),
        theta_box=ThetaBox(0.2, 1.2, 0.2, 1.2, 0.5, 1.5),
    )
    values.update(overrides)
    return PlantParameters(**values)


def make_paper_state(params: PlantParameters, grid: SimGrid) -> PlantState:
    x = grid.x
    return PlantState.initial(
        z=ProfileSpec(preset="paper_z").sample(x),
        w=ProfileSpec(preset="paper_w").sample(x),
        X=np.array([1.0, -1.0]),
        Y=np.array([5.0, 0.0]),
        params=params,
    )


@pytest.fixture
def paper_params():
    return make_paper_params()


@pytest.fixture
def coarse_grid():
    """Nx = 20, the coarse step that suffices for nominal runs."""
    return SimGrid(Nx=20, dt=1e-3)


@pytest.fixture
def paper_state(paper_params, coarse_grid):
    return make_paper_state(paper_params, coarse_grid)


@pytest.fixture
def paper_gains():
    return GainConfig(kappas=(30.0, 10.0), cs=(38.0, 20.0), cbar=20.0)


@pytest.fixture
def transport_params():
    """Uncoupled scalar plant: d1 = d2 = 0, p = 0, one actuator state, no nonlinearity."""
    return PlantParameters(
        q1=1.0, q2=1.0, d1=0.0, d2=0.0, p=0.0, b=1.0,
        l=np.array([0.0]), M=np.array([0.0]), qbar=np.array([0.0]),
        nonlinearity=StrictFeedbackNonlinearity(["0"]),
        theta_box=ThetaBox(-0.2, 0.2, -0.2, 0.2, 0.5, 1.5),
    )
