"""Scenario-file fixtures for the harness tests."""

import pytest

from safepde.harness.scenario import SCENARIO_DIR


@pytest.fixture
def transport_text():
    return (SCENARIO_DIR / "pure_transport.toml").read_text(encoding="utf-8")


@pytest.fixture
def write_scenario(tmp_path):
    def write(text, name="scenario.toml"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write
