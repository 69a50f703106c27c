"""Tests for the plant state, the explicit step and boundary derivatives."""

import numpy as np
import pytest

from safepde.core.plant import PlantState, boundary_time_derivatives, step
from safepde.core.plant.simulator import ode_rhs
from safepde.exceptions import ContractViolation, NumericFault
from safepde.models.plant import SimGrid


def _transport_state(params, grid):
    x = grid.x
    return PlantState.initial(
        z=np.zeros_like(x), w=1.0 + np.sin(np.pi * x) ** 2,
        X=np.array([1.0]), Y=np.array([0.5]), params=params,
    )


class TestPlantState:
    def test_boundary_samples_overwritten(self, paper_params, coarse_grid):
        x = coarse_grid.x
        state = PlantState.initial(
            z=2 * np.sin(3 * np.pi * x), w=np.cos(2 * np.pi * x),
            X=np.array([0.5, -1.0]), Y=np.array([5.0, 0.0]), params=paper_params,
        )
        assert state.w[-1] == 0.5
        assert state.z[0] == paper_params.p * state.w[0]

    def test_size_mismatch(self, paper_params, coarse_grid):
        x = coarse_grid.x
        with pytest.raises(ContractViolation):
            PlantState.initial(z=x, w=x, X=np.array([1.0]), Y=np.array([0.0, 0.0]), params=paper_params)

    def test_profiles_must_match(self):
        with pytest.raises(ContractViolation):
            PlantState(t=0.0, z=np.zeros(5), w=np.zeros(6), X=np.zeros(1), Y=np.zeros(1))

    def test_norm_of_zero_state(self, paper_params):
        assert PlantState.zeros(paper_params, 10).norm_sq() == 0.0

    def test_norm_counts_odes(self, paper_params):
        state = PlantState.zeros(paper_params, 10)
        state = PlantState(t=0.0, z=state.z, w=np.ones(11), X=np.array([1.0, 0.0]), Y=np.array([0.0, 2.0]))
        assert state.norm_sq() == pytest.approx(1.0 + 1.0 + 4.0)


class TestStep:
    def test_unit_courant_number_shifts_w_exactly(self, transport_params):
        grid = SimGrid(Nx=10, dt=0.1)
        state = _transport_state(transport_params, grid)
        new = step(state, 0.0, transport_params, grid)
        np.testing.assert_allclose(new.w[:-1], state.w[1:], atol=1e-15)
        np.testing.assert_array_equal(new.z, np.zeros_like(new.z))
        assert new.step_index == 1
        assert new.t == pytest.approx(0.1)

    def test_distal_integrator(self, transport_params):
        grid = SimGrid(Nx=10, dt=0.1)
        state = _transport_state(transport_params, grid)
        new = step(state, 0.0, transport_params, grid)
        # l = 0: y' = w(0) frozen over the step
        assert new.Y[0] == pytest.approx(0.5 + 0.1 * state.w[0])

    def test_actuator_reaches_boundary(self, transport_params):
        grid = SimGrid(Nx=10, dt=0.1)
        state = _transport_state(transport_params, grid)
        new = step(state, 2.0, transport_params, grid)
        assert new.X[0] == pytest.approx(1.2)
        assert new.w[-1] == new.X[0]

    def test_non_finite_input_faults(self, paper_params, paper_state, coarse_grid):
        with pytest.raises(NumericFault) as exc:
            step(paper_state, float("nan"), paper_params, coarse_grid)
        assert exc.value.details["step_index"] == 1

    def test_ode_rhs_structure(self, paper_params):
        X, Y = np.array([1.0, 2.0]), np.array([3.0, 4.0])
        dX, dY = ode_rhs(X, Y, 0.5, 0.25, np.array([1.0, -1.0]), paper_params)
        assert dX[0] == pytest.approx(2.0 + 1.0)  # x2 + x1^2
        # x1 x2 + qbar.(z(1), z_t(1)) + M.Y + U
        assert dX[1] == pytest.approx(2.0 + 0.0 + 0.1 * 3.0 + 0.3 * 4.0 + 0.5)
        np.testing.assert_allclose(dY, [4.0, 3.0 - 2.0 + 0.25])


class TestBoundaryDerivatives:
    def test_order_exceeds_m_minus_one(self, paper_params, paper_state):
        with pytest.raises(ContractViolation):
            boundary_time_derivatives(paper_state, paper_params.theta, 2, paper_params)

    def test_linear_profile(self, paper_params):
        x = np.linspace(0.0, 1.0, 21)
        state = PlantState(t=0.0, z=x.copy(), w=np.zeros_like(x), X=np.zeros(2), Y=np.zeros(2))
        bd = boundary_time_derivatives(state, paper_params.theta, 1, paper_params)
        assert bd.z1[0] == pytest.approx(1.0)
        # z_t = -q1 z_x + d1 w
        assert bd.z1[1] == pytest.approx(-1.0)
        # w_t(0) = q2 w_x(0) + d2 z(0)
        assert bd.w0[1] == pytest.approx(0.0)

    def test_batched_theta(self, paper_params):
        x = np.linspace(0.0, 1.0, 21)
        state = PlantState(t=0.0, z=np.zeros_like(x), w=np.ones_like(x), X=np.zeros(2), Y=np.zeros(2))
        d1s = np.array([0.2, 0.8])
        bd = boundary_time_derivatives(state, (d1s, np.array([1.0, 1.0])), 1, paper_params)
        np.testing.assert_allclose(bd.z1[1], d1s)
