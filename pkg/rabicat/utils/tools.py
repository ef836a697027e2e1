"""
Utility functions for CSV emission, metadata sidecars and config hashing.
"""

import hashlib
import json
from pathlib import Path
from typing import Any

import numpy as np
import polars as pl
import yaml

CSV_SIGNIFICANT_DIGITS = 12


def get_package_version() -> str:
    """
    Get RABICAT package version.

    Returns
    -------
    str
        Version string or 'unknown'
    """
    try:
        import rabicat

        return getattr(rabicat, "__version__", "unknown")
    except Exception:
        return "unknown"


def format_float_column(values: np.ndarray) -> np.ndarray:
    """
    Render a float array with a fixed number of significant digits.

    Parameters
    ----------
    values : np.ndarray
        Real values.

    Returns
    -------
    np.ndarray
        String array, ``%.12g`` formatting.
    """
    values = np.asarray(values, dtype=float)
    return np.char.mod(f"%.{CSV_SIGNIFICANT_DIGITS}g", values)


def write_csv(df: pl.DataFrame, path: str | Path) -> Path:
    """
    Write a DataFrame as CSV with deterministic float formatting.

    Float columns are rendered to strings first so the output does not depend
    on the polars float printer. Integer and string columns are written as is.

    Parameters
    ----------
    df : pl.DataFrame
        Table to write.
    path : str or Path
        Destination file. Parent directories are created.

    Returns
    -------
    Path
        The written path.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    columns = {}
    for name in df.columns:
        series = df[name]
        if series.dtype in (pl.Float64, pl.Float32):
            columns[name] = format_float_column(series.to_numpy()).tolist()
        else:
            columns[name] = series.cast(pl.Utf8).to_list()

    pl.DataFrame(columns).write_csv(path, quote_style="never")
    return path


def hash_config(config: dict[str, Any]) -> str:
    """
    SHA256 hash of a configuration mapping.

    Keys are sorted so logically identical configs hash identically.

    Parameters
    ----------
    config : Dict[str, Any]
        JSON-serializable mapping.

    Returns
    -------
    str
        64-character hexadecimal digest
    """
    canonical = json.dumps(config, sort_keys=True, default=str)
    return hashlib.sha256(canonical.encode()).hexdigest()


def metadata_path_for(path: str | Path) -> Path:
    """Sidecar path ``<file>.meta.yaml`` for an output file."""
    path = Path(path)
    return path.with_name(path.name + ".meta.yaml")


def write_metadata(path: str | Path, metadata: dict[str, Any]) -> Path:
    """
    Write the YAML metadata sidecar next to an output file.

    Parameters
    ----------
    path : str or Path
        The data file the metadata describes.
    metadata : Dict[str, Any]
        Plain mapping (numbers, strings, lists, nested dicts).

    Returns
    -------
    Path
        Path of the written sidecar.
    """
    meta_path = metadata_path_for(path)
    payload = dict(metadata)
    payload.setdefault("rabicat_version", get_package_version())
    with open(meta_path, "w") as f:
        yaml.safe_dump(payload, f, sort_keys=True, default_flow_style=False)
    return meta_path


def read_metadata(path: str | Path) -> dict[str, Any]:
    """
    Read the metadata sidecar of an output file.

    Raises
    ------
    FileNotFoundError
        If no sidecar exists.
    """
    meta_path = metadata_path_for(path)
    if not meta_path.exists():
        raise FileNotFoundError(f"No metadata sidecar found: {meta_path}")
    with open(meta_path) as f:
        return yaml.safe_load(f)
