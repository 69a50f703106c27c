"""Tests for the free distal response and the assumption report."""

import json

import numpy as np
import pytest
from scipy import linalg

from safepde.core.plant import PlantState, predict_Y_free, validate
from safepde.exceptions import ContractViolation
from safepde.models.plant import SimGrid
from tests.conftest import make_paper_state


class TestPredictYFree:
    def test_zero_profiles_give_matrix_exponential(self, paper_params, coarse_grid):
        zero = np.zeros(coarse_grid.Nx + 1)
        state = PlantState(t=0.0, z=zero, w=zero.copy(), X=np.zeros(2), Y=np.array([5.0, 0.0]))
        free = predict_Y_free(state, paper_params)
        expected = linalg.expm(paper_params.A) @ state.Y
        np.testing.assert_allclose(free.at_end(), expected, rtol=1e-10)
        np.testing.assert_allclose(free.forced_per_b[-1], 0.0, atol=1e-14)

    def test_linear_in_b(self, paper_params, paper_state):
        free = predict_Y_free(paper_state, paper_params)
        np.testing.assert_allclose(free.at_end(1.0), free.Y[-1], rtol=1e-12)
        delta = free.at_end(1.5) - free.at_end(0.5)
        np.testing.assert_allclose(delta, free.forced_per_b[-1], rtol=1e-10)

    def test_horizon_limited_to_transit_time(self, paper_params, paper_state):
        with pytest.raises(ContractViolation):
            predict_Y_free(paper_state, paper_params, horizon=1.5)

    def test_uncoupled_transport_integrates_inflow(self, transport_params):
        grid = SimGrid(Nx=200, dt=0.005)
        x = grid.x
        state = PlantState.initial(
            z=np.zeros_like(x), w=1.0 + np.sin(np.pi * x) ** 2,
            X=np.array([1.0]), Y=np.array([0.5]), params=transport_params,
        )
        free = predict_Y_free(state, transport_params, resolution=200)
        # y(1) = 0.5 + int_0^1 (1 + sin^2(pi s)) ds
        assert free.at_end()[0] == pytest.approx(2.0, abs=1e-4)


class TestValidate:
    def test_cfl_failure_reported(self, paper_params):
        grid = SimGrid(Nx=20, dt=0.1)
        report = validate(paper_params, make_paper_state(paper_params, grid), grid)
        assert report.get("cfl").passed is False
        assert not report.passed

    def test_boundary_and_origin_checks(self, paper_params, paper_state, coarse_grid):
        report = validate(paper_params, paper_state, coarse_grid)
        assert report.get("boundary_compatibility").passed is True
        assert report.get("nonlinearity_origin").passed is True
        assert report.get("theta_in_box").passed is True
        assert report.get("distal_initial_sign").passed is True

    def test_actuator_margin_skipped_without_gains(self, paper_params, paper_state, coarse_grid):
        report = validate(paper_params, paper_state, coarse_grid)
        assert report.get("actuator_initial_margin").passed is None

    def test_negative_distal_start(self, paper_params, coarse_grid):
        state = make_paper_state(paper_params, coarse_grid)
        state = PlantState(t=0.0, z=state.z, w=state.w, X=state.X, Y=np.array([-1.0, 0.0]))
        report = validate(paper_params, state, coarse_grid)
        assert report.get("distal_initial_sign").passed is False
        assert "distal_initial_sign" in [c.name for c in report.failures()]

    def test_uncoupled_transport_passes(self, transport_params):
        grid = SimGrid(Nx=50, dt=0.01)
        x = grid.x
        state = PlantState.initial(
            z=np.zeros_like(x), w=1.0 + np.sin(np.pi * x) ** 2,
            X=np.array([1.0]), Y=np.array([0.5]), params=transport_params,
        )
        report = validate(transport_params, state, grid, kappas=(1.0,))
        assert report.get("kernel_applicability").passed is True
        assert report.get("distal_free_response").passed is True

    def test_report_serialises(self, paper_params, paper_state, coarse_grid):
        data = validate(paper_params, paper_state, coarse_grid).as_dict()
        assert set(data) == {"passed", "checks"}
        assert all("name" in c for c in data["checks"])

    def test_report_holds_plain_python_values(self, paper_params, paper_gains, paper_state, coarse_grid):
        report = validate(paper_params, paper_state, coarse_grid, kappas=paper_gains.kappas)
        for check in report.checks:
            assert check.passed is None or type(check.passed) is bool
            assert check.value is None or type(check.value) is float
        decoded = json.loads(json.dumps(report.as_dict()))
        assert decoded["passed"] is report.passed
