"""
Run configuration tables and parser.
"""

from .defaults import CONFIG_SCHEMA, DEFAULT_OUTPUTS, FLAG_TO_KEY, SUPPORTED_OUTPUTS
from .run_config import (
    RunConfig,
    build_run_config,
    load_config,
    parse_config,
    run_config_from_dict,
)

__all__ = [
    "CONFIG_SCHEMA",
    "DEFAULT_OUTPUTS",
    "FLAG_TO_KEY",
    "SUPPORTED_OUTPUTS",
    "RunConfig",
    "build_run_config",
    "load_config",
    "parse_config",
    "run_config_from_dict",
]
