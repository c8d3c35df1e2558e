"""
Base/shared configuration management for the association pipeline.
"""
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional, Type, TypeVar

from pydantic import BaseModel, ValidationError

from src.errors import ConfigError

# Try to load python-dotenv if available
try:
    from dotenv import load_dotenv
    load_dotenv()  # Load .env file if it exists
except ImportError:
    pass  # python-dotenv is optional

logger = logging.getLogger(__name__)

SEED_ENV_VAR = "SPIKE_ASSOC_SEED"
DEFAULT_SEED = 0

M = TypeVar("M", bound=BaseModel)


def _env_int(name: str, default: Optional[int]) -> Optional[int]:
    raw = os.getenv(name)
    if raw in (None, ""):
        return default
    try:
        return int(raw)
    except ValueError as e:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from e


def get_app_config() -> Dict[str, Any]:
    """
    Get application configuration settings.

    Returns:
        Dictionary with application configuration

    Raises:
        ConfigError: If SPIKE_ASSOC_SEED or SPIKE_ASSOC_JOBS is not an integer
    """
    return {
        "seed": _env_int(SEED_ENV_VAR, None),
        "jobs": _env_int("SPIKE_ASSOC_JOBS", 1),
        "log_level": os.getenv("SPIKE_ASSOC_LOG_LEVEL", "INFO"),
        "log_file": os.getenv("SPIKE_ASSOC_LOG_FILE") or None,
    }


def resolve_seed(cli_seed: Optional[int] = None, file_seed: Optional[int] = None) -> int:
    """
    Pick the effective seed.

    Precedence: ``--seed`` flag, then the config file, then SPIKE_ASSOC_SEED,
    then the built-in default.

    Args:
        cli_seed: Seed given on the command line, if any
        file_seed: Seed found in the config file, if any

    Returns:
        The seed to use

    Raises:
        ConfigError: If SPIKE_ASSOC_SEED is set but not an integer
    """
    if cli_seed is not None:
        return int(cli_seed)
    if file_seed is not None:
        return int(file_seed)
    env_seed = get_app_config()["seed"]
    return env_seed if env_seed is not None else DEFAULT_SEED


def load_json_config(config_path: str) -> Dict[str, Any]:
    """
    Load a JSON configuration file.

    Args:
        config_path: Path to the JSON file

    Returns:
        Parsed JSON object

    Raises:
        ConfigError: If the file is missing, unreadable or not a JSON object
    """
    config_file = Path(config_path)
    if not config_file.exists():
        raise ConfigError(f"Config file not found: {config_file}")

    try:
        with open(config_file, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read config file {config_file}: {e}") from e

    if not isinstance(data, dict):
        raise ConfigError(f"Config file {config_file} must contain a JSON object")

    logger.info(f"Loaded configuration from {config_file}")
    return data


def build_config(model_cls: Type[M], data: Dict[str, Any]) -> M:
    """
    Validate raw configuration data against a pydantic model.

    Args:
        model_cls: Pydantic model class
        data: Raw mapping (typically from load_json_config)

    Returns:
        Validated model instance

    Raises:
        ConfigError: One-line summary of every validation failure
    """
    try:
        return model_cls.model_validate(data)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}"
            for err in e.errors()
        )
        raise ConfigError(f"Invalid {model_cls.__name__}: {problems}") from e
