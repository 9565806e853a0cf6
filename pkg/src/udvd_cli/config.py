"""Configuration management for udvd-cli."""

import json
import logging
import os
from pathlib import Path
from typing import Optional

from pydantic import Field, ValidationError
from pydantic_settings import BaseSettings

from .errors import ConfigError, config_errors
from .train import TrainConfig

# Constants
APP_NAME = "udvd"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Settings(BaseSettings):
    """Environment-based settings, also read from ``.env``."""
    udvd_threads: Optional[int] = Field(default=None, alias="UDVD_THREADS", ge=1)
    udvd_log_level: str = Field(default="WARNING", alias="UDVD_LOG_LEVEL")

    class Config:
        env_file = ".env"
        extra = "ignore"


def get_settings() -> Settings:
    try:
        return Settings()
    except ValidationError as e:
        raise ConfigError(f"invalid environment settings: {e}")


def worker_count(requested: Optional[int] = None) -> int:
    """
    Number of worker threads, from (in order of precedence):
    1. An explicit request (e.g. a ``--workers`` flag)
    2. Environment variable UDVD_THREADS
    3. The CPU count

    The environment value also caps explicit requests.
    """
    cap = get_settings().udvd_threads or os.cpu_count() or 1
    if requested is None:
        return cap
    return max(1, min(requested, cap))


def log_level(verbose: bool = False) -> int:
    if verbose:
        return logging.DEBUG
    name = get_settings().udvd_log_level.upper()
    if name not in LOG_LEVELS:
        raise ConfigError(f"UDVD_LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}, got {name}")
    return getattr(logging, name)


def load_train_config(path: Path) -> TrainConfig:
    """Load a TrainConfig from JSON; the ``model`` object mirrors UdvdConfig."""
    path = Path(path)
    try:
        with open(path) as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON: {e}")
    with config_errors(str(path)):
        return TrainConfig.model_validate(data)


def save_train_config(config: TrainConfig, path: Path) -> None:
    """Save a TrainConfig as JSON."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(config.model_dump(mode="json"), f, indent=2)
