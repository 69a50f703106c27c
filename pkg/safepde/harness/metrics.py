"""Per-run Prometheus metrics, written next to the traces as a text file."""

from __future__ import annotations

from pathlib import Path

from prometheus_client import CollectorRegistry, Counter, Histogram, write_to_textfile


class RunMetrics:
    def __init__(self, mode: str):
        self.registry = CollectorRegistry()
        self.steps_total = Counter(
            "safepde_steps_total", "Simulation steps taken", ["mode"], registry=self.registry
        )
        self.triggers_total = Counter(
            "safepde_triggers_total", "Identifier triggers processed", ["mode"], registry=self.registry
        )
        self.filter_active_steps_total = Counter(
            "safepde_filter_active_steps_total",
            "Steps on which the safety filter overrode the adaptive input",
            ["mode"],
            registry=self.registry,
        )
        self.excitation_steps_total = Counter(
            "safepde_excitation_steps_total",
            "Steps with an excitation pulse added",
            ["mode"],
            registry=self.registry,
        )
        self.step_seconds = Histogram(
            "safepde_step_seconds",
            "Wall-clock seconds per simulation step (control and plant update)",
            ["mode"],
            buckets=(1e-4, 5e-4, 1e-3, 5e-3, 1e-2, 5e-2, 0.1, 0.5, 1.0),
            registry=self.registry,
        )
        self.mode = mode

    def step(self, seconds: float, filter_active: bool, excitation: bool) -> None:
        self.steps_total.labels(mode=self.mode).inc()
        self.step_seconds.labels(mode=self.mode).observe(seconds)
        if filter_active:
            self.filter_active_steps_total.labels(mode=self.mode).inc()
        if excitation:
            self.excitation_steps_total.labels(mode=self.mode).inc()

    def trigger(self) -> None:
        self.triggers_total.labels(mode=self.mode).inc()

    def value(self, name: str) -> float:
        sample = self.registry.get_sample_value(name, {"mode": self.mode})
        return float(sample or 0.0)

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        write_to_textfile(str(path), self.registry)
        return path
