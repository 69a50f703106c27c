"""Tests for trace records and output files."""

import numpy as np

from safepde.harness.metrics import RunMetrics
from safepde.harness.traces import Snapshots, TraceRecord, emit_traces, trace_columns


class TestTraceColumns:
    def test_required_columns(self):
        columns = trace_columns(2, 2)
        for name in ("t", "y1", "y2", "x1", "x2", "Ud", "Ua", "d1hat", "d2hat", "bhat", "h1", "h2", "Z1", "Z2"):
            assert name in columns
        assert columns[0] == "t"
        assert len(columns) == len(set(columns))

    def test_row_matches_header(self):
        record = TraceRecord(t=0.5, Y=np.array([1.0, 2.0]), X=np.array([3.0, 4.0]), U=1.0, Ud=1.0, Ua=1.5,
                             theta_hat=(0.8, 1.0, 1.0), h=np.array([0.1, 0.2]))
        row = dict(zip(trace_columns(2, 2), record.row(2, 2)))
        assert row["y2"] == "2.0"
        assert row["eta"] == "-0.5"
        assert row["bhat"] == "1.0"
        assert row["Z1"] == ""
        assert row["filter_active"] == "0"


class TestEmitTraces:
    def test_empty_run_writes_header_only(self, tmp_path):
        paths = emit_traces([], tmp_path / "empty", n=2, m=2)
        lines = paths[0].read_text().splitlines()
        assert lines == [",".join(trace_columns(2, 2))]

    def test_snapshots_and_metrics(self, tmp_path):
        snapshots = Snapshots(x=np.linspace(0.0, 1.0, 5))
        snapshots.add(0.0, np.zeros(5), np.ones(5))
        snapshots.add(0.1, np.ones(5), np.zeros(5))
        metrics = RunMetrics("nominal")
        metrics.step(1e-3, filter_active=True, excitation=False)
        metrics.trigger()
        paths = emit_traces([], tmp_path, 1, 1, snapshots=snapshots, metrics=metrics)
        assert {p.name for p in paths} >= {"w_snapshots.txt", "metrics.prom"}
        np.testing.assert_allclose(np.loadtxt(tmp_path / "w_snapshots.txt"), [np.ones(5), np.zeros(5)])
        np.testing.assert_allclose(np.loadtxt(tmp_path / "snapshot_times.txt"), [0.0, 0.1])
        assert metrics.value("safepde_filter_active_steps_total") == 1.0
        assert metrics.value("safepde_triggers_total") == 1.0
        assert metrics.value("safepde_excitation_steps_total") == 0.0
