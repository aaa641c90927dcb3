import os
import logging

from dotenv import load_dotenv

load_dotenv()

DEFAULT_HEIGHT = 8
DEFAULT_JOBS = 1
DEFAULT_LOG_LEVEL = "WARNING"

# Permutation searches refuse to run above this many factors (m! conjugates).
PERMUTATION_GUARD = 10


def _int_from_env(name: str, default: int, minimum: int = 1) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw.strip())
    except ValueError:
        raise ValueError(f"{name} must be an integer, got '{raw}'")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


def search_height() -> int:
    """Height bound H used by nilpotent and product searches (QTLAB_HEIGHT)."""
    return _int_from_env("QTLAB_HEIGHT", DEFAULT_HEIGHT)


def census_jobs() -> int:
    """Default number of census worker processes (QTLAB_JOBS)."""
    return _int_from_env("QTLAB_JOBS", DEFAULT_JOBS)


def log_level() -> int:
    name = os.getenv("QTLAB_LOG_LEVEL", DEFAULT_LOG_LEVEL).strip().upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        raise ValueError(f"QTLAB_LOG_LEVEL must be a logging level name, got '{name}'")
    return level
