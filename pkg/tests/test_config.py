"""
Tests for run-configuration parsing, validation and precedence.
"""

import pytest
import yaml

from rabicat.config.defaults import CONFIG_SCHEMA, DEFAULT_OUTPUTS, FLAG_TO_KEY, KEY_SECTION
from rabicat.config.run_config import (
    RunConfig,
    build_run_config,
    load_config,
    parse_config,
    run_config_from_dict,
)
from rabicat.errors import ConfigError

REFERENCE_TEXT = """\
# Reference cat run
[model]
R=100, lambda=0.75, delta=0.5, mu=1.3e-3
[plan]
t_max=30
[outputs]
outputs=t, avg_x, overlap, p_left
"""


class TestSchemaTables:
    def test_every_flag_maps_to_a_schema_key(self):
        for key in FLAG_TO_KEY.values():
            assert key in KEY_SECTION

    def test_required_keys_have_no_default(self):
        for keys in CONFIG_SCHEMA.values():
            for spec in keys.values():
                if spec["required"]:
                    assert spec["default"] is None


class TestParseConfig:
    def test_reference_run(self):
        cfg = parse_config(REFERENCE_TEXT)
        assert cfg.model.R == 100.0
        assert cfg.model.lam == 0.75
        assert cfg.model.mu == 1.3e-3
        assert cfg.model.gamma == 0.0
        assert cfg.fock.n_max == 400
        assert cfg.plan.t_max == 30.0
        assert cfg.plan.dt == 0.01
        assert cfg.outputs == ("t", "avg_x", "overlap", "p_left")

    def test_sections_are_optional(self):
        cfg = parse_config("R=10\nlambda=0.75\ndelta=0.5\nn_max=60")
        assert cfg.fock.n_max == 60
        assert cfg.outputs == DEFAULT_OUTPUTS

    def test_missing_required_key_names_field(self):
        with pytest.raises(ConfigError, match="required key missing") as excinfo:
            parse_config("lambda=0.75, delta=0.5")
        assert excinfo.value.field == "R"

    def test_unknown_key_reports_line(self):
        with pytest.raises(ConfigError, match="unknown key") as excinfo:
            parse_config("R=100, lambda=0.75, delta=0.5\n\nomega=2")
        assert excinfo.value.line == 3
        assert excinfo.value.field == "omega"
        assert str(excinfo.value).startswith("line 3: omega:")

    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="duplicate key") as excinfo:
            parse_config("R=100, lambda=0.75, delta=0.5\nR=200")
        assert excinfo.value.line == 2

    def test_unknown_section(self):
        with pytest.raises(ConfigError, match="unknown section"):
            parse_config("[solver]\nR=100")

    def test_key_in_wrong_section(self):
        with pytest.raises(ConfigError, match="key belongs to section"):
            parse_config("[plan]\nR=100")

    def test_malformed_piece(self):
        with pytest.raises(ConfigError, match="key=value"):
            parse_config("R=100, lambda 0.75")

    def test_empty_value(self):
        with pytest.raises(ConfigError, match="empty value"):
            parse_config("R=, lambda=0.75, delta=0.5")

    def test_invalid_number(self):
        with pytest.raises(ConfigError, match="invalid value") as excinfo:
            parse_config("R=big, lambda=0.75, delta=0.5")
        assert excinfo.value.field == "R"

    def test_integer_key_rejects_fraction(self):
        with pytest.raises(ConfigError, match="integer"):
            parse_config("R=10, lambda=0.75, delta=0.5, n_max=40.5")

    @pytest.mark.parametrize(
        "text, field",
        [
            ("R=-1, lambda=0.75, delta=0.5", "model"),
            ("R=10, lambda=0.75, delta=0.5, n_max=0", "fock"),
            ("R=10, lambda=0.75, delta=0.5, dt=-0.1", "plan"),
            ("R=10, lambda=0.75, delta=0.5, outputs=t entropy", "outputs"),
        ],
    )
    def test_invariant_violations_name_the_field(self, text, field):
        with pytest.raises(ConfigError) as excinfo:
            parse_config(text)
        assert excinfo.value.field == field

    def test_outputs_start_with_time(self):
        cfg = parse_config("R=10, lambda=0.75, delta=0.5\noutputs=avg_x, t, overlap")
        assert cfg.outputs == ("t", "avg_x", "overlap")


class TestOverrides:
    def test_flags_win_over_file(self):
        cfg = parse_config(REFERENCE_TEXT, {"mu": 0.0, "t_max": 12.0, "n_max": 300})
        assert cfg.model.mu == 0.0
        assert cfg.plan.t_max == 12.0
        assert cfg.fock.n_max == 300

    def test_none_overrides_are_ignored(self):
        cfg = parse_config(REFERENCE_TEXT, {"mu": None})
        assert cfg.model.mu == 1.3e-3

    def test_unknown_override(self):
        with pytest.raises(ConfigError, match="unknown override key"):
            build_run_config({}, {"omega": 1.0})

    def test_flags_only(self):
        cfg = load_config(None, {"R": 4, "lambda": 0.75, "delta": 0.5})
        assert cfg.model.R == 4.0
        assert cfg.fock.n_max == 16


class TestLoadConfig:
    def test_text_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(REFERENCE_TEXT)
        assert load_config(path) == parse_config(REFERENCE_TEXT)

    def test_nested_yaml(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text(
            yaml.safe_dump(
                {
                    "model": {"R": 100, "lambda": 0.75, "delta": 0.5, "mu": 1.3e-3},
                    "plan": {"t_max": 30},
                    "outputs": ["t", "avg_x", "overlap", "p_left"],
                }
            )
        )
        assert load_config(path) == parse_config(REFERENCE_TEXT)

    def test_flat_yaml(self, tmp_path):
        path = tmp_path / "run.yml"
        path.write_text("R: 4\nlambda: 0.75\ndelta: 0.5\nmethod: krylov\n")
        cfg = load_config(path)
        assert cfg.plan.method == "krylov"

    def test_yaml_unknown_key(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("model:\n  R: 4\n  omega: 1\n")
        with pytest.raises(ConfigError, match="unknown key"):
            load_config(path)

    def test_yaml_must_be_mapping(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("- R\n- lambda\n")
        with pytest.raises(ConfigError, match="mapping"):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_config(tmp_path / "absent.cfg")


class TestRunConfig:
    def test_round_trip_through_dict(self):
        cfg = parse_config(REFERENCE_TEXT)
        assert run_config_from_dict(cfg.to_dict()) == cfg

    def test_hash_is_stable_and_sensitive(self):
        cfg = parse_config(REFERENCE_TEXT)
        assert cfg.config_hash() == parse_config(REFERENCE_TEXT).config_hash()
        assert cfg.config_hash() != parse_config(REFERENCE_TEXT, {"mu": -1.3e-3}).config_hash()
        assert len(cfg.config_hash()) == 64

    def test_replace_model(self, small_config, small_params):
        other = small_config.replace_model(small_params.with_mu(0.1))
        assert other.model.mu == 0.1
        assert other.fock == small_config.fock
        assert isinstance(other, RunConfig)

    def test_rejects_unsupported_outputs(self, small_params, small_fock, short_plan):
        with pytest.raises(ConfigError, match="unsupported outputs"):
            RunConfig(small_params, small_fock, short_plan, outputs=("t", "wigner"))
