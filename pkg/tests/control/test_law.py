"""Tests for controller contexts, context banks and the control law."""

import numpy as np
import pytest

from safepde.core.control import ContextStore, build_context, control_U, evaluate_law, gamma_derivs
from safepde.core.control.context import rp_tables_by_recursion, rp_tables_closed_form
from safepde.core.kernels import gain_vector_K, psi_phi_row
from safepde.core.plant import PlantState, boundary_time_derivatives, step, transport_rhs
from safepde.core.plant.simulator import ode_rhs
from safepde.core.quadrature import trapezoid_weights, upwind_weights
from safepde.exceptions import ContractViolation, MissingContextError
from safepde.models.plant import SimGrid
from tests.conftest import make_settings


@pytest.fixture
def store(paper_params, paper_gains, coarse_grid):
    return ContextStore(paper_params, paper_gains, coarse_grid, make_settings(KERNEL_RESOLUTION=40))


def rates(state, params, U, z1):
    """The semi-discrete time derivative of ``state`` packed as a PlantState."""
    z_t, w_t = transport_rhs(state.z, state.w, params.d1, params.d2, params.q1, params.q2, 1.0 / state.Nx)
    dX, dY = ode_rhs(state.X, state.Y, U, float(state.w[0]), z1, params)
    return PlantState(t=state.t, z=z_t, w=w_t, X=dX, Y=dY)


def compatible_linear_state(params, x):
    """Linear profiles meeting z(0) = p w(0), w(1) = x1 and their first time derivatives."""
    w = 1.0 + x
    z = 1.0 - 1.2 * x
    x1 = 2.0
    w_t_end = params.q2 * 1.0 + params.d2 * z[-1]
    x2 = w_t_end - float(params.nonlinearity.evaluate(np.array([x1, 0.0]))[0])
    return PlantState(t=0.0, z=z, w=w, X=np.array([x1, x2]), Y=np.array([5.0, 0.0]))


def continuous_gammas(state, ctx, params):
    """Gamma^{(i)} from the R_i/P_i recursion tables with exact boundary terms."""
    R, P = rp_tables_by_recursion(ctx.kernel.row, params, ctx.theta, params.m)
    weights = trapezoid_weights(state.z.size, 1.0 / state.Nx)
    bd = boundary_time_derivatives(state, ctx.theta, params.m - 1, params)
    q1, q2 = params.q1, params.q2
    out = []
    for i in range(params.m + 1):
        g = weights @ (R[i] * state.z) + weights @ (P[i] * state.w) + ctx.lambdaA[i] @ state.Y
        for j in range(i):
            k = i - 1 - j
            g += (
                -q1 * R[k, -1] * bd.z1[j]
                + q1 * R[k, 0] * bd.z0[j]
                + q2 * P[k, -1] * bd.w1[j]
                - (q2 * P[k, 0] - ctx.lambdaAB[k]) * bd.w0[j]
            )
        out.append(g)
    return np.array(out), bd


def expanded_U(state, gammas, bd, params, cs, c_last):
    """The hand-expanded m = 2 controller."""
    X, Y = state.X, state.Y
    f = params.nonlinearity.evaluate(X)
    df1 = params.nonlinearity.df1_dx1(X)
    c1 = cs[0]
    h1 = X[0] - gammas[0]
    h2 = X[1] + c1 * h1 + f[0] - gammas[1]
    return (
        -c_last * h2 - f[1] + (-c1 - df1) * (X[1] + f[0]) + c1 * gammas[1]
        - params.qbar @ bd.z1[:2] - params.M @ Y + gammas[2]
    )


class TestContext:
    def test_rp_closed_form_matches_recursion(self, paper_params):
        K = gain_vector_K(paper_params, (30.0, 10.0))
        y = np.linspace(0.0, 1.0, 161)
        row = psi_phi_row(paper_params, paper_params.theta, K, y, settings=make_settings(KERNEL_RESOLUTION=160))
        R_cf, P_cf = rp_tables_closed_form(row, paper_params, paper_params.theta, 2)
        R_rec, P_rec = rp_tables_by_recursion(row, paper_params, paper_params.theta, 2)
        for closed, recursive in ((R_cf, R_rec), (P_cf, P_rec)):
            scale = np.max(np.abs(closed), axis=1, keepdims=True)
            np.testing.assert_allclose(closed / scale, recursive / scale, atol=1e-3)

    def test_lambda_powers(self, paper_params, paper_gains, coarse_grid):
        ctx = build_context(paper_params, paper_params.theta, paper_gains, coarse_grid)
        A = paper_params.A
        np.testing.assert_allclose(ctx.lambdaA[1], ctx.kernel.lambda_one @ A)
        np.testing.assert_allclose(ctx.lambdaA[2], ctx.kernel.lambda_one @ A @ A)
        np.testing.assert_allclose(ctx.lambdaAB, ctx.lambdaA[:, -1] * paper_params.b)

    def test_closed_form_limited_to_two(self, paper_params, coarse_grid):
        K = gain_vector_K(paper_params, (30.0, 10.0))
        row = psi_phi_row(paper_params, paper_params.theta, K, coarse_grid.x, settings=make_settings(KERNEL_RESOLUTION=20))
        with pytest.raises(ContractViolation):
            rp_tables_closed_form(row, paper_params, paper_params.theta, 3)

    def test_gamma_coefficients_skip_boundary_samples(self, store, paper_params):
        ctx = store.context(paper_params.theta)
        assert ctx.z_coef.shape == ctx.w_coef.shape == (3, 21)
        np.testing.assert_array_equal(ctx.z_coef[:, 0], 0.0)
        np.testing.assert_array_equal(ctx.w_coef[:, -1], 0.0)
        assert ctx.x1_coef[0] == 0.0

    def test_first_coefficients_approach_the_R_P_tables(self, paper_params, paper_gains):
        grid = SimGrid(Nx=200, dt=1e-3)
        ctx = ContextStore(paper_params, paper_gains, grid, make_settings(KERNEL_RESOLUTION=100)).context(paper_params.theta)
        inner = slice(2, -2)
        for coef, table in ((ctx.z_coef[1], ctx.R_tab[1]), (ctx.w_coef[1], ctx.P_tab[1])):
            scale = np.max(np.abs(table))
            np.testing.assert_allclose(coef[inner] / grid.dx, table[inner], atol=0.1 * scale)


class TestContextStore:
    def test_contexts_are_cached(self, store, paper_params):
        assert store.context(paper_params.theta) is store.context((0.8, 1.0, 1.0))

    def test_bank_shapes(self, store):
        bank = store.bank([[0.8, 1.0, 1.0], [0.4, 0.6, 0.5]])
        assert len(bank) == 2
        assert bank.z_coef.shape == (2, 3, 21)
        assert bank.x1_coef.shape == (2, 3)
        assert bank.lambdaA.shape == (2, 3, 2)
        np.testing.assert_allclose(bank.d1, [0.8, 0.4])

    def test_lookup_requires_built_contexts(self, store):
        store.bank([[0.8, 1.0, 1.0]])
        assert len(store.lookup([[0.8, 1.0, 1.0]])) == 1
        with pytest.raises(MissingContextError):
            store.lookup([[1.2, 1.2, 1.5]])


class TestGammaDerivatives:
    def test_gamma_is_the_boundary_functional(self, store, paper_params, paper_state):
        ctx = store.context(paper_params.theta)
        wz, ww = upwind_weights(paper_state.z.size, 1.0 / paper_state.Nx)
        expected = (
            wz @ (ctx.kernel.psi1 * paper_state.z)
            + ww @ (ctx.kernel.phi1 * paper_state.w)
            + ctx.kernel.lambda_one @ paper_state.Y
        )
        assert gamma_derivs(paper_state, ctx, 0, paper_params)[0] == pytest.approx(expected)

    def test_gamma_order_bounded_by_m(self, store, paper_params, paper_state):
        with pytest.raises(ContractViolation):
            gamma_derivs(paper_state, store.context(paper_params.theta), 3, paper_params)

    def test_derivatives_follow_the_semi_discrete_flow(self, store, paper_params, paper_state):
        ctx = store.context(paper_params.theta)
        law = evaluate_law(paper_state, store.bank([paper_params.theta]), paper_params, 20.0)
        state_dot = rates(paper_state, paper_params, float(law.U[0]), law.z1[:, 0])

        gammas = gamma_derivs(paper_state, ctx, 2, paper_params)
        along_flow = gamma_derivs(state_dot, ctx, 1, paper_params)
        np.testing.assert_allclose(gammas[1], along_flow[0], rtol=1e-9, atol=1e-8)
        np.testing.assert_allclose(gammas[2], along_flow[1], rtol=1e-9, atol=1e-6)

    def test_first_derivative_matches_closed_loop_steps(self, store, paper_params, paper_state, coarse_grid):
        ctx = store.context(paper_params.theta)
        bank = store.bank([paper_params.theta])
        A, B, lam = paper_params.A, paper_params.B, ctx.kernel.lambda_one
        state = paper_state
        for _ in range(5):
            gammas = gamma_derivs(state, ctx, 1, paper_params)
            U = float(evaluate_law(state, bank, paper_params, 20.0).U[0])
            new = step(state, U, paper_params, coarse_grid)
            transport_change = (
                gamma_derivs(new, ctx, 0, paper_params)[0] - gammas[0] - lam @ (new.Y - state.Y)
            ) / coarse_grid.dt
            transport_rate = gammas[1] - lam @ (A @ state.Y + B * state.w[0])
            assert transport_change == pytest.approx(transport_rate, rel=1e-6, abs=1e-6)
            state = new

    def test_closed_loop_satisfies_the_target_chain(self, store, paper_params, paper_gains, paper_state):
        ctx = store.context(paper_params.theta)
        c1, c2 = paper_gains.cs
        law = evaluate_law(paper_state, store.bank([paper_params.theta]), paper_params, c2)
        h1, h2 = law.h[0]
        state_dot = rates(paper_state, paper_params, float(law.U[0]), law.z1[:, 0])
        along_flow = gamma_derivs(state_dot, ctx, 1, paper_params)

        dX = state_dot.X
        df1 = paper_params.nonlinearity.df1_dx1(paper_state.X)
        h1_dot = dX[0] - along_flow[0]
        tau1_dot = -c1 * h1_dot - df1 * dX[0]
        h2_dot = dX[1] - tau1_dot - along_flow[1]

        scale = 1.0 + np.max(np.abs(dX)) + np.max(np.abs(law.gammas))
        assert h1_dot == pytest.approx(-c1 * h1 + h2, abs=1e-8 * scale)
        assert h2_dot == pytest.approx(-c2 * h2, abs=1e-8 * scale)

    def test_law_converges_to_the_expanded_controller(self, paper_params, paper_gains):
        gamma_gaps, u_gaps = [], []
        for Nx in (50, 200):
            grid = SimGrid(Nx=Nx, dt=0.5 / Nx)
            store = ContextStore(paper_params, paper_gains, grid, make_settings(KERNEL_RESOLUTION=100))
            ctx = store.context(paper_params.theta)
            state = compatible_linear_state(paper_params, grid.x)
            reference, bd = continuous_gammas(state, ctx, paper_params)
            law = evaluate_law(state, store.bank([paper_params.theta]), paper_params, 20.0)
            gamma_gaps.append(np.abs(law.gammas[0] - reference))
            u_gaps.append(abs(law.U[0] - expanded_U(state, reference, bd, paper_params, paper_gains.cs, 20.0)))
        assert np.all(gamma_gaps[1] <= 0.5 * gamma_gaps[0] + 1e-9)
        assert u_gaps[1] <= 0.5 * u_gaps[0] + 1e-9


class TestLaw:
    def test_h1_definition(self, store, paper_params, paper_state):
        bank = store.bank([paper_params.theta])
        law = evaluate_law(paper_state, bank, paper_params, 20.0)
        assert law.h[0, 0] == pytest.approx(paper_state.X[0] - law.gammas[0, 0])

    def test_rate_enters_linearly(self, store, paper_params, paper_state):
        bank = store.bank([paper_params.theta, (0.4, 0.6, 0.5)])
        low = evaluate_law(paper_state, bank, paper_params, 20.0)
        high = evaluate_law(paper_state, bank, paper_params, 25.0)
        np.testing.assert_allclose(high.U - low.U, -5.0 * low.h[:, -1], rtol=1e-9, atol=1e-9)

    def test_control_U_defaults_to_c_m(self, store, paper_params, paper_state):
        ctx = store.context(paper_params.theta)
        bank = store.bank([paper_params.theta])
        expected = evaluate_law(paper_state, bank, paper_params, 20.0).U[0]
        assert control_U(paper_state, ctx, paper_params) == pytest.approx(expected)

    def test_bank_matches_single_evaluation(self, store, paper_params, paper_state):
        thetas = [(0.8, 1.0, 1.0), (0.4, 0.6, 0.5), (1.2, 0.2, 1.5)]
        batched = evaluate_law(paper_state, store.bank(thetas), paper_params, 20.0).U
        single = [control_U(paper_state, store.context(t), paper_params, 20.0) for t in thetas]
        np.testing.assert_allclose(batched, single, rtol=1e-10)
