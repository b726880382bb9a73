import pytest

import config
from src import create_app, get_environment
from src.exceptions import MalformedInput
from src.services.runner import RunOptions


class TestAppConfiguration:
    """Test cases for Flask application configuration."""

    def test_app_exists(self, app):
        """Test that the Flask app exists."""
        assert app is not None

    def test_test_configuration(self, app):
        assert app.config["TESTING"] is True
        assert app.config["ENV_NAME"] == "test"
        assert app.config["SEED"] == 1234
        assert app.config["GRID_SIZE"] == 256

    def test_environment_under_pytest(self):
        assert get_environment() == "test"

    def test_invalid_environment(self):
        with pytest.raises(ValueError):
            create_app("staging")

    def test_production_config(self):
        app = create_app("production")
        assert app.config["DEBUG"] is False
        assert app.config["HOST"] == "0.0.0.0"

    def test_command_group_registered(self, app):
        assert "covalg" in app.cli.commands


class TestEnvironmentOverrides:
    """Numeric settings read from the environment."""

    def test_int_from_env(self, monkeypatch):
        monkeypatch.setenv("COVALG_SAMPLES", "40")
        assert config._env_int("COVALG_SAMPLES", 24) == 40

    def test_empty_value_uses_default(self, monkeypatch):
        monkeypatch.setenv("COVALG_TOLERANCE", "")
        assert config._env_float("COVALG_TOLERANCE", 1e-9) == 1e-9

    def test_unset_uses_default(self, monkeypatch):
        monkeypatch.delenv("COVALG_WINDOW", raising=False)
        assert config._env_int("COVALG_WINDOW", 8) == 8


class TestRunOptions:
    """Options assembled from config and command-line overrides."""

    def test_from_config(self, app):
        opts = RunOptions.from_config(app.config)
        assert opts.seed == 1234
        assert opts.samples == 12
        assert opts.tol == app.config["TOLERANCE"]

    def test_overrides_win_unless_none(self, app):
        opts = RunOptions.from_config(app.config, samples=3, seed=None)
        assert opts.samples == 3
        assert opts.seed == 1234

    @pytest.mark.parametrize("field, value", [("tol", -1.0), ("x_max", 0), ("max_k", 0), ("window", 0)])
    def test_validate(self, app, field, value):
        opts = RunOptions.from_config(app.config, **{field: value})
        with pytest.raises(MalformedInput):
            opts.validate()
