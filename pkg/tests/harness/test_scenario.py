"""Tests for scenario parsing, schema errors and overrides."""

import numpy as np
import pytest

from safepde.exceptions import CFLViolation, ConfigSchemaError, ConfigurationError
from safepde.harness.scenario import (
    apply_overrides,
    build_inputs,
    locate_key,
    parse_config,
    parse_config_text,
    resolve_config_path,
)


def line_of(text, needle):
    return text.splitlines().index(needle) + 1


class TestParseConfig:
    def test_bundled_paper_scenario(self):
        config = parse_config("paper")
        assert config.run.mode == "adaptive"
        assert config.identifier.theta0 == [0.2, 0.2, 0.5]
        assert config.identifier.T == 1.5 and config.identifier.Ntilde == 10
        assert config.gains.kappas == [30.0, 10.0]
        assert config.filter.cbar == 20.0

    def test_bundled_name_with_suffix(self):
        assert resolve_config_path("paper_nominal.toml").name == "paper_nominal.toml"

    def test_missing_file(self):
        with pytest.raises(ConfigurationError):
            resolve_config_path("no_such_scenario")

    def test_explicit_path(self, transport_text, write_scenario):
        config = parse_config(write_scenario(transport_text))
        assert config.name == "pure_transport"
        assert config.run.mode == "open-loop"

    def test_missing_field_names_field_and_line(self, transport_text):
        text = transport_text.replace("q1 = 1.0\n", "", 1)
        with pytest.raises(ConfigSchemaError) as exc:
            parse_config_text(text, path="broken.toml")
        errors = exc.value.details["errors"]
        assert errors[0]["field"] == "plant.q1"
        assert errors[0]["line"] == line_of(text, "[plant]")
        assert "plant.q1" in exc.value.message
        assert exc.value.details["path"] == "broken.toml"

    def test_unknown_key_is_rejected(self, transport_text):
        text = transport_text.replace("q1 = 1.0\n", "q1 = 1.0\nspeed = 3.0\n", 1)
        with pytest.raises(ConfigSchemaError) as exc:
            parse_config_text(text)
        error = exc.value.details["errors"][0]
        assert error["field"] == "plant.speed"
        assert error["line"] == line_of(text, "speed = 3.0")

    def test_invalid_toml(self):
        with pytest.raises(ConfigSchemaError):
            parse_config_text("name = = 1\n")

    def test_cfl_rule(self, transport_text):
        with pytest.raises(CFLViolation) as exc:
            parse_config_text(transport_text.replace("dt = 0.01", "dt = 0.05"))
        assert "rule" in exc.value.details

    def test_controlled_run_needs_two_transits(self, transport_text):
        text = transport_text.replace('mode = "open-loop"', 'mode = "nominal"').replace(
            "horizon = 2.0", "horizon = 1.0"
        )
        with pytest.raises(ConfigurationError):
            parse_config_text(text)

    def test_adaptive_needs_identifier(self, transport_text):
        with pytest.raises(ConfigSchemaError):
            parse_config_text(transport_text.replace('mode = "open-loop"', 'mode = "adaptive"'))


class TestLocateKey:
    def test_nested_sections(self):
        text = "[plant]\nq1 = 1\n\n[plant.theta_box]\nb = [0.5, 1.5]\n"
        assert locate_key(text, ("plant", "q1")) == 2
        assert locate_key(text, ("plant", "theta_box", "b")) == 5
        assert locate_key(text, ("plant", "theta_box", "d1")) == 4

    def test_list_indices_are_ignored(self):
        text = "[initial]\nX = [1.0, 'a']\n"
        assert locate_key(text, ("initial", "X", 1)) == 2


class TestOverrides:
    def test_grid_and_run_overrides(self, transport_text):
        config = apply_overrides(parse_config_text(transport_text), nx=100, dt=0.005, horizon=1.0,
                                 seed=7, out="elsewhere")
        assert (config.grid.Nx, config.grid.dt) == (100, 0.005)
        assert config.run.horizon == 1.0 and config.run.seed == 7
        assert config.output.directory == "elsewhere"

    def test_invalid_override(self, transport_text):
        with pytest.raises(ConfigSchemaError):
            apply_overrides(parse_config_text(transport_text), nx=1)

    def test_override_rechecks_cfl(self, transport_text):
        with pytest.raises(CFLViolation):
            apply_overrides(parse_config_text(transport_text), nx=200)


class TestBuildInputs:
    def test_transport_inputs(self, transport_text):
        inputs = build_inputs(parse_config_text(transport_text))
        assert inputs.params.n == 1 and inputs.params.m == 1
        assert inputs.grid.Nx == 50
        np.testing.assert_allclose(inputs.state0.z, 0.0)
        assert inputs.state0.w[-1] == inputs.state0.X[0] == 1.0
        assert inputs.state0.w[25] == pytest.approx(2.0)

    def test_paper_inputs(self):
        inputs = build_inputs(parse_config("paper_nominal"))
        assert inputs.params.theta == (0.8, 1.0, 1.0)
        np.testing.assert_allclose(inputs.params.A, [[0.0, 1.0], [1.0, -0.5]])
        assert inputs.state0.w[-1] == 1.0
        assert inputs.state0.z[0] == inputs.state0.w[0]
