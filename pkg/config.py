import os
from dotenv import load_dotenv

load_dotenv()

basedir = os.path.abspath(os.path.dirname(__file__))


def _env_float(name, default):
    value = os.getenv(name)
    return float(value) if value not in (None, "") else default


def _env_int(name, default):
    value = os.getenv(name)
    return int(value) if value not in (None, "") else default


class Config:
    """Base configuration."""

    FLASK_APP = "app.py"
    APP_NAME = "covalg"
    SCHEMA_VERSION = 1
    JSON_SORT_KEYS = False

    # Numerical defaults shared by the CLI and the HTTP surface.
    # Library calls never read these; they are passed down explicitly.
    TOLERANCE = _env_float("COVALG_TOLERANCE", 1e-9)
    SEED = _env_int("COVALG_SEED", 0)
    SAMPLES = _env_int("COVALG_SAMPLES", 24)
    X_MAX = _env_int("COVALG_X_MAX", 4)
    MAX_K = _env_int("COVALG_MAX_K", 3)
    WINDOW = _env_int("COVALG_WINDOW", 8)
    GRID_SIZE = _env_int("COVALG_GRID_SIZE", 1024)


class TestConfig(Config):
    """Test configuration."""

    DEBUG = True
    TESTING = True
    PORT = 5000
    HOST = "localhost"
    SEED = 1234
    SAMPLES = 12
    GRID_SIZE = 256


class DevConfig(Config):
    """Development configuration."""

    DEBUG = True
    PORT = _env_int("PORT", 5000)
    HOST = "localhost"


class ProdConfig(Config):
    """Production configuration."""

    DEBUG = False
    PORT = _env_int("PORT", 8080)
    HOST = "0.0.0.0"
