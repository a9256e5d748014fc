import os
from typing import Optional
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def get_env_variable(var_name: str, default: Optional[str] = None) -> str:
    """
    Safely retrieve environment variables

    :param var_name: Name of the environment variable
    :param default: Default value if variable is not set
    :return: Value of the environment variable
    """
    value = os.getenv(var_name, default)
    if value is None or value.strip() == "":
        raise ValueError(f"Critical environment variable {var_name} is not set!")
    return value.strip()


def get_float_variable(var_name: str, default: float) -> float:
    raw = get_env_variable(var_name, str(default))
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"Environment variable {var_name} must be a number, got {raw!r}")


def get_int_variable(var_name: str, default: int) -> int:
    raw = get_env_variable(var_name, str(default))
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"Environment variable {var_name} must be an integer, got {raw!r}")


class Config:
    """Centralized configuration for the analysis library and the `chop` CLI"""

    # Logging configuration
    LOG_LEVEL = get_env_variable('CHOPPER_LOG_LEVEL', 'WARNING').upper()
    # Empty means no file logging
    LOG_DIR = os.getenv('CHOPPER_LOG_DIR', '').strip()

    # Analysis defaults
    DEFAULT_METRIC = get_env_variable('CHOPPER_DEFAULT_METRIC', 'time')
    STOP_PCT = get_float_variable('CHOPPER_STOP_PCT', 0.5)
    RANK_AGG = get_env_variable('CHOPPER_RANK_AGG', 'sum')
    SCALING_AGG = get_env_variable('CHOPPER_SCALING_AGG', 'mean')

    # Rendering
    PRECISION = get_int_variable('CHOPPER_PRECISION', 3)

    # Canonical on-disk format
    SCHEMA_TAG = 'chopper-profile-v1'
    INCLUSIVE_SUFFIX = ' (inc)'
