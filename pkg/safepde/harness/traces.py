"""Trace records and their on-disk formats.

trace.csv        one row per step, fixed header (see ``trace_columns``)
z_snapshots.txt  field snapshots, rows = snapshot times, columns = x-grid
w_snapshots.txt
snapshot_times.txt
run_summary.json margins, t_f, estimate history, norms
metrics.prom     Prometheus text exposition of the run counters
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
from pydantic import BaseModel, Field

from safepde.exceptions import TraceWriteError
from safepde.harness.metrics import RunMetrics
from safepde.utils.logger import get_logger

logger = get_logger(__name__)


def trace_columns(n: int, m: int) -> list[str]:
    return (
        ["t"]
        + [f"y{i}" for i in range(1, n + 1)]
        + [f"x{i}" for i in range(1, m + 1)]
        + ["U", "Ud", "Ua", "cmax", "filter_active", "eta", "u_gap", "excitation",
           "d1hat", "d2hat", "bhat", "D_size"]
        + [f"h{i}" for i in range(1, m + 1)]
        + [f"Z{i}" for i in range(1, n + 1)]
        + ["V", "beta_min"]
    )


def _fmt(value: Optional[float]) -> str:
    if value is None:
        return ""
    return repr(float(value))


@dataclass
class TraceRecord:
    t: float
    Y: np.ndarray
    X: np.ndarray
    U: float
    Ud: float = 0.0
    Ua: float = 0.0
    cmax: Optional[float] = None
    filter_active: bool = False
    u_gap: float = 0.0
    excitation: float = 0.0
    theta_hat: Optional[tuple[float, float, float]] = None
    D_size: int = 0
    h: Optional[np.ndarray] = None
    Z: Optional[np.ndarray] = None
    V: Optional[float] = None
    beta_min: Optional[float] = None
    norm_sq: float = 0.0

    @property
    def eta(self) -> float:
        return self.Ud - self.Ua

    def row(self, n: int, m: int) -> list[str]:
        theta = self.theta_hat if self.theta_hat is not None else (None, None, None)
        h = self.h if self.h is not None else [None] * m
        Z = self.Z if self.Z is not None else [None] * n
        return (
            [_fmt(self.t)]
            + [_fmt(v) for v in self.Y]
            + [_fmt(v) for v in self.X]
            + [_fmt(self.U), _fmt(self.Ud), _fmt(self.Ua), _fmt(self.cmax),
               str(int(self.filter_active)), _fmt(self.eta), _fmt(self.u_gap), _fmt(self.excitation)]
            + [_fmt(v) for v in theta]
            + [str(int(self.D_size))]
            + [_fmt(v) for v in h]
            + [_fmt(v) for v in Z]
            + [_fmt(self.V), _fmt(self.beta_min)]
        )


@dataclass
class Snapshots:
    x: np.ndarray
    t: List[float] = field(default_factory=list)
    z: List[np.ndarray] = field(default_factory=list)
    w: List[np.ndarray] = field(default_factory=list)

    def add(self, t: float, z: np.ndarray, w: np.ndarray) -> None:
        self.t.append(float(t))
        self.z.append(np.array(z))
        self.w.append(np.array(w))

    def matrix(self, which: str) -> np.ndarray:
        rows = self.z if which == "z" else self.w
        return np.array(rows).reshape(len(rows), self.x.size)


class RunSummary(BaseModel):
    """Structured end-of-run report (run_summary.json)."""

    name: str
    mode: str
    seed: int
    steps: int = 0
    horizon: float
    Nx: int
    dt: float
    t_f: Optional[float] = None
    theta_true: List[float]
    theta_final: Optional[List[float]] = None
    estimate_history: List[Dict[str, Any]] = Field(default_factory=list)
    excitation_injections: List[Dict[str, Any]] = Field(default_factory=list)
    margins: Dict[str, Any] = Field(default_factory=dict)
    decay: Optional[Dict[str, Any]] = None
    lyapunov: Optional[Dict[str, Any]] = None
    gains: Dict[str, Any] = Field(default_factory=dict)
    validation: Dict[str, Any] = Field(default_factory=dict)
    initial_norm_sq: float = 0.0
    final_norm_sq: float = 0.0
    diverged: bool = False
    fault: Optional[Dict[str, Any]] = None
    wall_clock_seconds: float = 0.0


class TraceWriter:
    """Streams trace rows to trace.csv; use as a context manager."""

    def __init__(self, directory: str | Path, n: int, m: int):
        self.directory = Path(directory)
        self.n, self.m = n, m
        self.path = self.directory / "trace.csv"
        self._file = None
        self._writer = None
        self.rows = 0

    def __enter__(self) -> "TraceWriter":
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            self._file = open(self.path, "w", newline="", encoding="utf-8")
        except OSError as e:
            raise TraceWriteError(str(self.path), str(e)) from e
        self._writer = csv.writer(self._file, lineterminator="\n")
        self._writer.writerow(trace_columns(self.n, self.m))
        return self

    def write(self, record: TraceRecord) -> None:
        try:
            self._writer.writerow(record.row(self.n, self.m))
        except OSError as e:
            raise TraceWriteError(str(self.path), str(e)) from e
        self.rows += 1

    def __exit__(self, exc_type, exc, tb) -> None:
        if self._file is not None:
            self._file.close()


def _write_matrix(path: Path, matrix: np.ndarray, header: str) -> Path:
    try:
        np.savetxt(path, matrix, fmt="%.17g", header=header)
    except OSError as e:
        raise TraceWriteError(str(path), str(e)) from e
    return path


def emit_traces(
    records: Iterable[TraceRecord],
    directory: str | Path,
    n: int,
    m: int,
    snapshots: Optional[Snapshots] = None,
    summary: Optional[RunSummary] = None,
    metrics: Optional[RunMetrics] = None,
) -> list[Path]:
    """Write every output file of a (possibly faulted or empty) run."""
    out = Path(directory)
    paths: list[Path] = []
    with TraceWriter(out, n, m) as writer:
        for record in records:
            writer.write(record)
    paths.append(writer.path)

    if snapshots is not None:
        header = f"rows: snapshot times (snapshot_times.txt); columns: {snapshots.x.size} x-grid points on [0, 1]"
        paths.append(_write_matrix(out / "z_snapshots.txt", snapshots.matrix("z"), header))
        paths.append(_write_matrix(out / "w_snapshots.txt", snapshots.matrix("w"), header))
        paths.append(_write_matrix(out / "snapshot_times.txt", np.array(snapshots.t), "t"))

    if summary is not None:
        path = out / "run_summary.json"
        try:
            path.write_text(summary.model_dump_json(indent=2), encoding="utf-8")
        except OSError as e:
            raise TraceWriteError(str(path), str(e)) from e
        paths.append(path)

    if metrics is not None:
        try:
            paths.append(metrics.write(out / "metrics.prom"))
        except OSError as e:
            raise TraceWriteError(str(out / "metrics.prom"), str(e)) from e

    logger.info("traces_written", directory=str(out), rows=writer.rows, files=len(paths))
    return paths
