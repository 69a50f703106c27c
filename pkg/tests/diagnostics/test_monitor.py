"""Tests for the safety monitor and the decay check."""

import numpy as np
import pytest

from safepde.core.diagnostics import MonitorSeries, decay_check, safety_monitor

T = np.linspace(0.0, 2.0, 21)


def make_series(**overrides):
    size = T.size
    values = dict(
        t=T,
        y1=np.ones(size),
        norm_sq=np.full(size, 4.0),
        h=np.ones((size, 2)),
        Z=np.ones((size, 2)),
        beta_min=np.full(size, 0.5),
    )
    values.update(overrides)
    return MonitorSeries(**values)


class TestSafetyMonitor:
    def test_positive_run_is_safe(self):
        report = safety_monitor(make_series(), q2=1.0, tol_num=1e-3)
        assert report.safe
        assert report.y1_min == 1.0
        assert report.z_min == [1.0, 1.0]
        assert report.h_min == [1.0, 1.0]
        assert report.norm_ratio == pytest.approx(1.0)
        assert not report.diverged
        assert report.as_dict()["safe"] is True

    def test_violations_beyond_tolerance(self):
        h = np.ones((T.size, 2))
        h[3, 1] = -0.01
        h[4, 0] = -1e-4
        report = safety_monitor(make_series(h=h), q2=1.0, tol_num=1e-3)
        assert report.violations == ["h2"]

    def test_y1_judged_relative_to_its_start(self):
        y1 = np.ones(T.size)
        y1[5] = -0.4
        report = safety_monitor(make_series(y1=y1), q2=1.0, tol_num=0.5)
        assert report.violations == ["y1"]
        assert report.y1_tol == pytest.approx(1e-6)

        y1[5] = -5e-7
        assert safety_monitor(make_series(y1=y1), q2=1.0, tol_num=1e-3).safe

    def test_distal_states_checked_after_one_transit(self):
        Z = np.ones((T.size, 2))
        Z[:10, 0] = -1.0  # t < 1/q2 is exempt
        beta = np.full(T.size, 0.5)
        beta[15] = -0.5
        report = safety_monitor(make_series(Z=Z, beta_min=beta), q2=1.0, tol_num=1e-3)
        assert report.violations == ["beta"]
        Z[12, 1] = -1.0
        assert "z2" in safety_monitor(make_series(Z=Z), q2=1.0, tol_num=1e-3).violations

    def test_missing_diagnostics_are_skipped(self):
        report = safety_monitor(
            make_series(beta_min=np.full(T.size, np.nan), Z=np.full((T.size, 2), np.nan)),
            q2=1.0, tol_num=1e-3,
        )
        assert report.beta_min is None
        assert report.z_min == [None, None]
        assert report.safe

    def test_divergence(self):
        norms = np.full(T.size, 4.0)
        norms[-1] = 40.0
        assert safety_monitor(make_series(norm_sq=norms), q2=1.0, tol_num=1e-3).diverged
        norms[-1] = np.inf
        report = safety_monitor(make_series(norm_sq=norms), q2=1.0, tol_num=1e-3)
        assert report.diverged
        assert report.norm_ratio == float("inf")


class TestDecayCheck:
    def test_exponential_decay_passes(self):
        report = decay_check(T, np.exp(-2.0 * T), t_f=0.0, sigma0=1.0, q2=1.0)
        assert report.passed
        assert report.checked == 11
        assert report.worst_ratio < 1.0

    def test_flat_V_fails(self):
        report = decay_check(T, np.ones(T.size), t_f=0.0, sigma0=1.0, q2=1.0)
        assert not report.passed
        assert report.worst_ratio == pytest.approx(np.exp(2.0))

    def test_starts_from_identification_time(self):
        V = np.where(T < 0.5, 100.0, np.exp(-(T - 0.5)))
        report = decay_check(T, V, t_f=0.5, sigma0=1.0, q2=1.0)
        assert report.passed
        assert report.worst_ratio == pytest.approx(1.0)

    def test_no_samples_after_transit(self):
        report = decay_check(T, np.ones(T.size), t_f=1.5, sigma0=1.0, q2=1.0)
        assert report.passed
        assert report.checked == 0
        assert report.worst_ratio is None
