"""
Utility module initialization.
"""

from .logging_config import (
    get_logger,
    setup_logging,
)
from .tools import (
    format_float_column,
    get_package_version,
    hash_config,
    metadata_path_for,
    read_metadata,
    write_csv,
    write_metadata,
)

__all__ = [
    "format_float_column",
    "get_package_version",
    "hash_config",
    "metadata_path_for",
    "read_metadata",
    "write_csv",
    "write_metadata",
    "setup_logging",
    "get_logger",
]
