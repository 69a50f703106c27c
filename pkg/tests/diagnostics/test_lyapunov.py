"""Tests for the Lyapunov analytics and the target-state reconstruction."""

from types import SimpleNamespace

import numpy as np
import pytest

from safepde.core.control import ContextStore
from safepde.core.diagnostics import (
    DiagnosticContext,
    TargetState,
    forward_transform,
    lyapunov_rate,
    lyapunov_V,
    xi_norm,
)
from safepde.core.diagnostics.lyapunov import solve_lyapunov
from safepde.core.kernels.gains import target_matrix
from safepde.exceptions import NonHurwitzError
from tests.conftest import make_settings


class TestSolveLyapunov:
    def test_scalar(self):
        P, residual = solve_lyapunov(np.array([[-1.0]]), np.array([[1.0]]))
        assert P[0, 0] == pytest.approx(0.5)
        assert residual < 1e-14

    def test_target_matrix(self):
        A = target_matrix((30.0, 10.0))
        P, residual = solve_lyapunov(A, np.eye(2))
        np.testing.assert_allclose(A.T @ P + P @ A, -np.eye(2), atol=1e-12)
        np.testing.assert_allclose(P, P.T)
        assert np.all(np.linalg.eigvalsh(P) > 0)


class TestLyapunovRate:
    def test_constants(self, paper_params, paper_gains):
        config = lyapunov_rate(paper_params, paper_gains)
        PB = config.P @ np.array([0.0, paper_params.b])
        assert config.a0 > paper_params.q1 * paper_params.p**2 / paper_params.q2 + 4.0 * PB @ PB
        assert config.r > paper_params.q2 * config.a0 * np.e / 3.0 + 1.0
        assert 0 < config.xi1 <= config.xi2
        assert 0 < config.sigma0 <= 1.0 / config.xi2

    def test_box_bound_on_b_raises_a0(self, paper_params, paper_gains):
        nominal = lyapunov_rate(paper_params, paper_gains)
        robust = lyapunov_rate(paper_params, paper_gains, b=paper_params.theta_box.b_max)
        assert robust.a0 > nominal.a0
        assert robust.sigma0 <= nominal.sigma0

    def test_non_hurwitz(self, paper_params):
        with pytest.raises(NonHurwitzError):
            lyapunov_rate(paper_params, SimpleNamespace(kappas=(30.0, 0.0)))


class TestLyapunovFunctional:
    def test_beta_only(self, paper_params, paper_gains):
        config = lyapunov_rate(paper_params, paper_gains)
        target = TargetState(t=0.0, Z=np.zeros(2), alpha=None, beta=np.ones(201), h=np.zeros(2))
        assert lyapunov_V(target, config) == pytest.approx(0.5 * config.a0 * (np.e - 1.0), rel=1e-4)
        assert xi_norm(target) == pytest.approx(1.0)

    def test_all_components(self, paper_params, paper_gains):
        config = lyapunov_rate(paper_params, paper_gains)
        Z = np.array([1.0, -2.0])
        target = TargetState(t=0.0, Z=Z, alpha=np.ones(201), beta=np.zeros(201), h=np.array([1.0, 1.0]))
        expected = Z @ config.P @ Z + config.r + 0.5 * (1.0 - np.exp(-1.0))
        assert lyapunov_V(target, config) == pytest.approx(expected, rel=1e-4)
        assert xi_norm(target) == pytest.approx(1.0 + 2.0 + 5.0)


class TestForwardTransform:
    @pytest.fixture
    def diagnostic(self, paper_params, paper_gains, coarse_grid):
        settings = make_settings(KERNEL_RESOLUTION=40, ORACLE_RESOLUTION=40)
        store = ContextStore(paper_params, paper_gains, coarse_grid, settings)
        return DiagnosticContext(paper_params, store.context(paper_params.theta), settings)

    def test_distal_boundary_matches_h1(self, diagnostic, paper_state):
        target = forward_transform(paper_state, diagnostic)
        assert target.beta[-1] == pytest.approx(target.h[0], rel=1e-9, abs=1e-9)
        assert target.alpha is not None
        assert target.alpha.shape == paper_state.z.shape

    def test_Z_follows_the_g_chain(self, diagnostic, paper_state):
        target = forward_transform(paper_state, diagnostic)
        # Z_1 = y_1 and Z_2 = y_2 + kappa_1 y_1
        np.testing.assert_allclose(target.Z, [5.0, 150.0])
