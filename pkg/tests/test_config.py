"""
Tests for RunConfig: environment, JSON file and command-line layering.
"""

import json
from fractions import Fraction

import pytest

from qvariant.analysis.errors import InvalidParameterError
from qvariant.analysis.qcore import HalfInt
from qvariant.config import RunConfig

ENV_KEYS = ("QVARIANT_MODE", "QVARIANT_P", "QVARIANT_N", "QVARIANT_SEED", "QVARIANT_DRAWS",
            "QVARIANT_OUTPUT", "QVARIANT_TOL", "QVARIANT_BIT_LIMIT", "QVARIANT_MAX_WORKERS")


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for key in ENV_KEYS:
        monkeypatch.delenv(key, raising=False)


class TestFromEnv:
    """Tests for environment variables."""

    def test_defaults(self):
        cfg = RunConfig.from_env()
        assert cfg.mode == "exact"
        assert cfg.p == "1/2"
        assert cfg.output == "json"
        assert cfg.params == {}

    def test_reads_variables(self, monkeypatch):
        monkeypatch.setenv("QVARIANT_MODE", "float")
        monkeypatch.setenv("QVARIANT_N", "7")
        monkeypatch.setenv("QVARIANT_SEED", "42")
        monkeypatch.setenv("QVARIANT_TOL", "1e-6")
        cfg = RunConfig.from_env()
        assert cfg.mode == "float"
        assert cfg.N == 7
        assert cfg.seed == 42
        assert cfg.tolerance == 1e-6

    def test_bad_integer(self, monkeypatch):
        monkeypatch.setenv("QVARIANT_N", "ten")
        with pytest.raises(InvalidParameterError):
            RunConfig.from_env()

    def test_bad_mode(self, monkeypatch):
        monkeypatch.setenv("QVARIANT_MODE", "symbolic")
        with pytest.raises(InvalidParameterError):
            RunConfig.from_env()


class TestConfigFile:
    """Tests for --config JSON files."""

    def test_file_overrides_fields(self, tmp_path):
        path = tmp_path / "run.json"
        data = {"N": 5, "draws": 3, "epsilons": [0.1, 0.01], "params": {"h1": "3/2", "t2": 3}}
        path.write_text(json.dumps(data))
        cfg = RunConfig(seed=9).merged_with_file(path)
        assert cfg.N == 5
        assert cfg.draws == 3
        assert cfg.seed == 9
        assert cfg.epsilons == (0.1, 0.01)
        assert cfg.params == {"h1": "3/2", "t2": "3"}

    def test_unknown_field_rejected(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"N": 5, "colour": "blue"}))
        with pytest.raises(InvalidParameterError):
            RunConfig.from_file(path)

    def test_negative_truncation_rejected(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"N": -1}))
        with pytest.raises(InvalidParameterError):
            RunConfig.from_file(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InvalidParameterError):
            RunConfig.from_file(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("{not json")
        with pytest.raises(InvalidParameterError):
            RunConfig.from_file(path)


class TestOverrides:
    """Tests for command-line overrides and validation."""

    def test_none_values_are_ignored(self):
        cfg = RunConfig(N=4).with_overrides(params={"h1": None, "h2": "1/2"}, N=None, seed=3)
        assert cfg.N == 4
        assert cfg.seed == 3
        assert cfg.params == {"h2": "1/2"}

    def test_params_merge(self):
        cfg = RunConfig(params={"h1": "1"}).with_overrides(params={"h2": "2"})
        assert cfg.params == {"h1": "1", "h2": "2"}

    def test_validate_rejects_unknown_param(self):
        with pytest.raises(InvalidParameterError):
            RunConfig(params={"gamma": "1"}).validate()

    def test_validate_rejects_non_half_integer_in_exact_mode(self):
        with pytest.raises(InvalidParameterError):
            RunConfig(params={"h1": "1/3"}).validate()

    def test_float_mode_accepts_any_exponent(self):
        RunConfig(mode="float", p="0.5", params={"h1": "1/3"}).validate()

    def test_validate_rejects_irrational_p_in_exact_mode(self):
        with pytest.raises(InvalidParameterError):
            RunConfig(p="0.5j").validate()

    @pytest.mark.parametrize(
        "field,value", [("mode", "symbolic"), ("output", "xml"), ("N", -1), ("draws", 0)]
    )
    def test_validate_rejects_bad_fields(self, field, value):
        with pytest.raises(InvalidParameterError):
            RunConfig(**{field: value}).validate()


class TestParams:
    """Tests for parameter construction."""

    def test_params2_defaults(self):
        cfg = RunConfig()
        ctx = cfg.context()
        p2 = cfg.params2(ctx)
        assert p2.h1 == HalfInt(2)
        assert p2.alpha2 == HalfInt(2)
        assert p2.t2 == Fraction(2)
        assert p2.lam == HalfInt(1)

    def test_params3_defaults(self):
        cfg = RunConfig()
        p3 = cfg.params3(cfg.context())
        assert p3.nu == HalfInt(2)
        assert p3.t3 == Fraction(3)

    def test_params2_override(self):
        cfg = RunConfig(params={"h2": "1"})
        assert cfg.params2(cfg.context()).lam == HalfInt(2)

    def test_to_dict_is_stable(self):
        cfg = RunConfig(params={"t2": "5", "h1": "1"})
        data = cfg.to_dict()
        assert list(data["params"]) == ["h1", "t2"]
        assert "max_workers" not in data
        assert "output" not in data
