"""
Configuration for comarr
Defaults, optionally overridden by a YAML file and the environment
"""

import os
import logging
from pathlib import Path
from typing import Optional

import yaml
from pydantic import BaseModel, Field

from .exceptions import InvalidInputError

logger = logging.getLogger(__name__)

CONFIG_ENV = "COM_ARR_CONFIG"
CACHE_ENV = "COM_ARR_CACHE"
DEFAULT_CONFIG_FILE = "comarr.yaml"


class Settings(BaseModel):
    """Runtime settings shared by the CLI and the library"""

    cache_dir: str = ".cache"
    max_hyperplanes: int = Field(60, ge=1)
    max_cells: int = Field(2_000_000, ge=1)
    threads: int = Field(1, ge=1)
    sample_trial_factor: int = Field(1000, ge=1)
    stream_size: int = Field(256, ge=1)
    progress: bool = True

    @property
    def cache_path(self) -> Path:
        return Path(self.cache_dir)


def load_settings(config_path: Optional[str] = None) -> Settings:
    """
    Build settings from defaults, a YAML file and the environment

    Args:
        config_path: Explicit YAML file; falls back to $COM_ARR_CONFIG, then ./comarr.yaml

    Returns:
        Validated Settings
    """
    values = {}

    path = config_path or os.environ.get(CONFIG_ENV)
    if path is None and Path(DEFAULT_CONFIG_FILE).exists():
        path = DEFAULT_CONFIG_FILE

    if path is not None:
        if not os.path.exists(path):
            raise InvalidInputError(f"Config file not found at {path}")
        with open(path, "r") as f:
            loaded = yaml.safe_load(f) or {}
        if not isinstance(loaded, dict):
            raise InvalidInputError(f"Config file {path} must contain a mapping")
        values.update(loaded)
        logger.debug(f"Loaded settings from {path}")

    cache_dir = os.environ.get(CACHE_ENV)
    if cache_dir:
        values["cache_dir"] = cache_dir

    try:
        return Settings(**values)
    except ValueError as e:
        raise InvalidInputError(f"Invalid configuration: {e}") from e


# Global settings instance
_settings = None


def get_settings(config_path: Optional[str] = None) -> Settings:
    """
    Get global settings instance

    Args:
        config_path: YAML file used on first load only

    Returns:
        Settings instance
    """
    global _settings
    if _settings is None:
        _settings = load_settings(config_path)
    return _settings


def reset_settings(settings: Optional[Settings] = None):
    """Replace (or drop) the global settings; the next get_settings() reloads"""
    global _settings
    _settings = settings
