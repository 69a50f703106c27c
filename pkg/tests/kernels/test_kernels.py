"""Tests for the closed-form kernels, the characteristics oracle and the gain vector."""

import numpy as np
import pytest
from scipy import linalg

from safepde.core.kernels import (
    build_kernel_context,
    gain_vector_K,
    kernel_FH,
    kernel_pde_oracle,
    lambda_gamma,
    psi_phi_row,
    solve_kernel_pair,
)
from safepde.core.kernels.context import KernelRowCache, dump_kernel_tables
from safepde.core.kernels.gains import target_matrix, target_transform
from safepde.exceptions import ContractViolation
from safepde.models.plant import Theta
from tests.conftest import make_paper_params, make_settings


def _closed_form_table(params, xs):
    I, J = np.tril_indices(xs.size)
    F, H = kernel_FH(xs[I], xs[J], params)
    return I, J, F, H


class TestClosedForm:
    def test_diagonal_value(self, paper_params):
        x = np.linspace(0.0, 1.0, 11)
        F, _ = kernel_FH(x, x, paper_params)
        np.testing.assert_allclose(F, -paper_params.d2 / (paper_params.q1 + paper_params.q2), atol=1e-12)

    def test_boundary_relation_at_zero(self):
        params = make_paper_params(q1=1.0, q2=2.0, p=0.7)
        x = np.linspace(0.0, 1.0, 11)
        F, H = kernel_FH(x, np.zeros_like(x), params)
        np.testing.assert_allclose(H, params.q1 * params.p / params.q2 * F, atol=1e-10)

    def test_outside_triangle_rejected(self, paper_params):
        with pytest.raises(ContractViolation):
            kernel_FH(0.2, 0.5, paper_params)

    def test_uncoupled_kernels_vanish(self, transport_params):
        F, H = kernel_FH(np.array([0.5, 1.0]), np.array([0.1, 0.3]), transport_params)
        np.testing.assert_array_equal(F, 0.0)
        np.testing.assert_array_equal(H, 0.0)

    def test_sign_conditions(self):
        params = make_paper_params(p=-1.0, check_box=False)
        with pytest.raises(ContractViolation):
            kernel_FH(0.5, 0.2, params)


class TestOracle:
    def test_agrees_with_closed_form(self, paper_params):
        table = kernel_pde_oracle(paper_params, resolution=100)
        I, J, F, H = _closed_form_table(paper_params, table.x)
        assert np.max(np.abs(table.K1[I, J] - F)) < 1e-2
        assert np.max(np.abs(table.K2[I, J] - H)) < 1e-2

    @pytest.mark.slow
    def test_agrees_with_closed_form_fine(self, paper_params):
        table = kernel_pde_oracle(paper_params, resolution=200)
        I, J, F, H = _closed_form_table(paper_params, table.x)
        assert np.max(np.abs(table.K1[I, J] - F)) < 5e-3
        assert np.max(np.abs(table.K2[I, J] - H)) < 5e-3

    def test_uncoupled_pair(self):
        g = lambda xs: 2.0 * xs
        table = solve_kernel_pair(a=1.0, b=1.0, c1=0.0, diag=0.5, c=1.0, c2=0.0, r=3.0, g=g, resolution=20)
        I, J = np.tril_indices(21)
        np.testing.assert_allclose(table.K1[I, J], 0.5)
        np.testing.assert_allclose(table.K2[I, J], 1.5 + 2.0 * (table.x[I] - table.x[J]))

    def test_speeds_must_be_positive(self):
        with pytest.raises(ContractViolation):
            solve_kernel_pair(a=0.0, b=1.0, c1=0.0, diag=0.0, c=1.0, c2=0.0, r=0.0, resolution=10)

    def test_sample_and_dump(self, paper_params, tmp_path):
        table = kernel_pde_oracle(paper_params, resolution=20)
        value = table.sample("K1", 0.5, 0.5)
        assert float(value) == pytest.approx(-0.5, abs=1e-6)
        paths = table.dump(tmp_path)
        assert [p.name for p in paths] == ["kernel_K1.txt", "kernel_K2.txt"]
        assert np.loadtxt(paths[0]).shape == (21, 21)


class TestGains:
    def test_places_target_matrix(self, paper_params):
        kappas = (30.0, 10.0)
        K = gain_vector_K(paper_params, kappas)
        closed = paper_params.A + np.outer(paper_params.B, K)
        T = target_transform(kappas)
        np.testing.assert_allclose(T @ closed @ np.linalg.inv(T), target_matrix(kappas), atol=1e-10)

    def test_scalar_case(self, transport_params):
        K = gain_vector_K(transport_params, (2.0,), b=0.5)
        np.testing.assert_allclose(K, [-4.0])

    def test_lambda_gamma_at_zero(self, paper_params):
        K = gain_vector_K(paper_params, (30.0, 10.0))
        lam, gam = lambda_gamma(0.0, paper_params, K)
        np.testing.assert_allclose(lam, K)
        np.testing.assert_allclose(gam, paper_params.p * K)

    def test_lambda_is_matrix_exponential(self, paper_params):
        K = gain_vector_K(paper_params, (30.0, 10.0))
        lam, _ = lambda_gamma(np.array([0.0, 0.4]), paper_params, K)
        np.testing.assert_allclose(lam[1], K @ linalg.expm(0.4 * paper_params.A / paper_params.q2), rtol=1e-12)


class TestRows:
    def test_boundary_identities(self, paper_params):
        settings = make_settings(KERNEL_RESOLUTION=50)
        K = gain_vector_K(paper_params, (30.0, 10.0))
        y = np.linspace(0.0, 1.0, 21)
        row = psi_phi_row(paper_params, paper_params.theta, K, y, settings=settings)
        qs = paper_params.q1 + paper_params.q2
        assert row.psi[-1] == pytest.approx(-paper_params.d2 / qs, abs=1e-6)
        lam1, _ = lambda_gamma(1.0, paper_params, K)
        r = paper_params.q1 * paper_params.p / paper_params.q2
        expected = r * row.psi[0] + lam1[-1] * paper_params.b / paper_params.q2
        assert row.phi[0] == pytest.approx(expected, abs=1e-6)

    def test_row_cache_shares_b(self, paper_params):
        cache = KernelRowCache(make_settings(KERNEL_RESOLUTION=20))
        y = np.linspace(0.0, 1.0, 11)
        for b in (1.0, 1.3):
            theta = Theta(0.8, 1.0, b)
            cache.get(paper_params, theta, gain_vector_K(paper_params, (30.0, 10.0), b=b), y)
        assert cache.misses == 1
        assert cache.hits == 1
        assert len(cache) == 1

    def test_context_and_dump(self, paper_params, tmp_path):
        x = np.linspace(0.0, 1.0, 11)
        cache = KernelRowCache(make_settings(KERNEL_RESOLUTION=20))
        ctx = build_kernel_context(paper_params, (0.8, 1.0, 1.0), (30.0, 10.0), x, cache=cache)
        np.testing.assert_allclose(ctx.lambda_one, ctx.lambda_at[-1])
        assert ctx.F_tab.shape == (11, 11)
        assert ctx.F_tab[0, 5] == 0.0
        paths = dump_kernel_tables(ctx, tmp_path)
        assert paths[0].name == "psi_phi_row.txt"
        assert np.loadtxt(paths[0]).shape == (11, 3)
