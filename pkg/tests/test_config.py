"""Tests for configuration resolution"""
import json
import logging

import pytest

from finch.config import Config, _read_version, setup_logging
from finch.jets import DEFAULT_CAPABILITY


def write_config(tmp_path, data):
    path = tmp_path / "config.json"
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return str(path)


class TestConfig:
    def test_defaults(self):
        config = Config()
        assert config.SEED == 42
        assert config.TOL == 1e-6
        assert config.SAMPLES == 100
        assert config.TRAJECTORIES == 10
        assert config.T_END == 3.0
        assert config.JET_ORDERS == tuple(DEFAULT_CAPABILITY)
        assert config.DEBUG is False

    def test_file_overrides_defaults(self, tmp_path):
        config = Config(write_config(tmp_path, {"seed": 7, "t_end": 1.5, "jet_orders": [2, 4, 5]}))
        assert config.SEED == 7
        assert config.T_END == 1.5
        assert config.JET_ORDERS == (2, 4, 5)

    def test_env_overrides_file(self, tmp_path, monkeypatch):
        monkeypatch.setenv("FINCH_SEED", "11")
        monkeypatch.setenv("FINCH_DEBUG", "yes")
        config = Config(write_config(tmp_path, {"seed": 7}))
        assert config.SEED == 11
        assert config.DEBUG is True

    def test_invalid_values_fall_back(self, tmp_path, monkeypatch, caplog):
        monkeypatch.setenv("FINCH_TOL", "small")
        with caplog.at_level(logging.WARNING, logger="finch.config"):
            config = Config(write_config(tmp_path, {"tol": 1e-3, "jet_orders": "deep"}))
        assert config.TOL == 1e-3
        assert config.JET_ORDERS == tuple(DEFAULT_CAPABILITY)
        assert "FINCH_TOL" in caplog.text

    def test_malformed_file_is_ignored(self, tmp_path, caplog):
        with caplog.at_level(logging.WARNING, logger="finch.config"):
            config = Config(write_config(tmp_path, "{broken"))
        assert config.SEED == 42
        assert "could not read config file" in caplog.text

    def test_config_path_from_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("FINCH_CONFIG", write_config(tmp_path, {"samples": 12}))
        assert Config().SAMPLES == 12

    def test_tolerances(self):
        tolerances = Config().tolerances(1e-4)
        assert tolerances.chi == 1e-4
        assert tolerances.drift == 1e-4
        assert tolerances.t_end == 3.0
        assert tolerances.rtol == 1e-10
        assert Config().tolerances().chi == 1e-6

    def test_to_dict(self):
        data = Config().to_dict()
        assert set(data) == {"seed", "tol", "samples", "trajectories", "t_end", "rtol", "atol",
                             "jet_orders", "debug", "config_file", "app_version"}
        assert data["app_version"] == "0.1.0"


def test_version_matches_pyproject():
    assert _read_version() == "0.1.0"


def test_setup_logging_is_idempotent():
    setup_logging(True)
    setup_logging(False)
    logger = logging.getLogger("finch")
    assert sum(getattr(h, "_finch", False) for h in logger.handlers) == 1
    assert logger.level == logging.WARNING
