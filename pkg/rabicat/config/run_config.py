"""
Run configuration: parsing, validation and precedence.

Configuration files are flat ``key=value`` text::

    # Schroedinger-cat reference run
    [model]
    R=100, lambda=0.75, delta=0.5, mu=1.3e-3
    [plan]
    t_max=30
    [outputs]
    outputs=t, avg_x, overlap, p_left

Section headers are optional. YAML files holding the same keys (flat or
nested by section) are accepted as well. Values are resolved with the
precedence defaults < file < command-line flags.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from ..dynamics.plan import PropagatorPlan
from ..errors import ConfigError
from ..model.fock_space import FockConfig
from ..model.rabi import ModelParams
from ..utils.logging_config import get_logger
from ..utils.tools import hash_config
from .defaults import CONFIG_SCHEMA, DEFAULT_OUTPUTS, KEY_SECTION, SUPPORTED_OUTPUTS

logger = get_logger(__name__)

_SECTION_RE = re.compile(r"^\[\s*([A-Za-z_]+)\s*\]$")


@dataclass(frozen=True)
class RunConfig:
    """
    Fully validated description of one run.

    Attributes
    ----------
    model : ModelParams
        Physical parameters.
    fock : FockConfig
        Truncation.
    plan : PropagatorPlan
        Sampling and propagator settings.
    outputs : Tuple[str, ...]
        Observable columns, always starting with ``t``.
    """

    model: ModelParams
    fock: FockConfig
    plan: PropagatorPlan
    outputs: tuple[str, ...] = field(default=DEFAULT_OUTPUTS)

    def __post_init__(self) -> None:
        unknown = [o for o in self.outputs if o not in SUPPORTED_OUTPUTS]
        if unknown:
            raise ConfigError(
                f"unsupported outputs {unknown}; choose from {list(SUPPORTED_OUTPUTS)}",
                field="outputs",
            )
        if not self.outputs or self.outputs[0] != "t":
            outputs = ("t",) + tuple(o for o in self.outputs if o != "t")
            object.__setattr__(self, "outputs", outputs)

    def to_dict(self) -> dict[str, Any]:
        """Nested mapping with the configuration key names."""
        return {
            "model": self.model.to_dict(),
            "fock": {"n_max": int(self.fock.n_max), "tail_tol": float(self.fock.tail_tol)},
            "plan": self.plan.to_dict(),
            "outputs": list(self.outputs),
        }

    def config_hash(self) -> str:
        return hash_config(self.to_dict())

    def replace_model(self, model: ModelParams) -> RunConfig:
        return RunConfig(model=model, fock=self.fock, plan=self.plan, outputs=self.outputs)


def _convert(key: str, raw: Any, line: int | None = None) -> Any:
    """Convert a raw value to the schema type of ``key``."""
    spec = CONFIG_SCHEMA[KEY_SECTION[key]][key]
    kind = spec["type"]
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            value = float(raw)
            if not value.is_integer():
                raise ValueError(f"expected an integer, got {raw!r}")
            return int(value)
        if kind == "list":
            if isinstance(raw, (list, tuple)):
                items = [str(v).strip() for v in raw]
            else:
                items = re.split(r"[,\s]+", str(raw))
            return tuple(item for item in items if item)
        return str(raw).strip()
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid value {raw!r} ({e})", line=line, field=key) from e


def _parse_text(text: str) -> dict[str, Any]:
    """
    Parse flat ``key=value`` text into raw converted values.

    Raises
    ------
    ConfigError
        For malformed lines, unknown or misplaced keys and duplicates.
    """
    values: dict[str, Any] = {}
    section: str | None = None
    last_key: str | None = None

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()

        # Skip empty lines and comments
        if not line:
            continue

        header = _SECTION_RE.match(line)
        if header:
            section = header.group(1)
            if section not in CONFIG_SCHEMA:
                raise ConfigError(
                    f"unknown section [{section}]; expected one of {list(CONFIG_SCHEMA)}",
                    line=lineno,
                )
            last_key = None
            continue

        for piece in line.split(","):
            piece = piece.strip()
            if not piece:
                continue
            if "=" not in piece:
                # Continuation of a list value such as "outputs=t, avg_x"
                if last_key is not None and CONFIG_SCHEMA[KEY_SECTION[last_key]][last_key][
                    "type"
                ] == "list":
                    values[last_key] = values[last_key] + (piece,)
                    continue
                raise ConfigError(f"expected key=value, got {piece!r}", line=lineno)

            key, value = piece.split("=", 1)
            key, value = key.strip(), value.strip()
            if key not in KEY_SECTION:
                raise ConfigError(f"unknown key {key!r}", line=lineno, field=key)
            if section is not None and KEY_SECTION[key] != section:
                raise ConfigError(
                    f"key belongs to section [{KEY_SECTION[key]}], found in [{section}]",
                    line=lineno,
                    field=key,
                )
            if key in values:
                raise ConfigError("duplicate key", line=lineno, field=key)
            if value == "":
                raise ConfigError("empty value", line=lineno, field=key)
            values[key] = _convert(key, value, lineno)
            last_key = key

    return values


def _flatten_mapping(data: dict[str, Any]) -> dict[str, Any]:
    """Flatten a YAML mapping that may be nested by section."""
    values: dict[str, Any] = {}
    for key, value in data.items():
        if key in CONFIG_SCHEMA and isinstance(value, dict):
            for sub_key, sub_value in value.items():
                if sub_key not in CONFIG_SCHEMA[key]:
                    raise ConfigError(f"unknown key in [{key}]", field=str(sub_key))
                values[sub_key] = sub_value
        elif key == "outputs" or key in KEY_SECTION:
            values[key] = value
        else:
            raise ConfigError("unknown key", field=str(key))
    return {k: _convert(k, v) for k, v in values.items()}


def build_run_config(
    values: dict[str, Any], overrides: dict[str, Any] | None = None
) -> RunConfig:
    """
    Validate a flat key mapping into a RunConfig.

    Parameters
    ----------
    values : Dict[str, Any]
        Converted values from a file.
    overrides : Dict[str, Any], optional
        Values taking precedence (command-line flags). ``None`` entries are
        ignored.

    Returns
    -------
    RunConfig
        Validated configuration.

    Raises
    ------
    ConfigError
        Missing required key or violated invariant, naming the field.
    """
    merged = dict(values)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in KEY_SECTION:
            raise ConfigError("unknown override key", field=key)
        merged[key] = _convert(key, value)

    resolved: dict[str, Any] = {}
    for section, keys in CONFIG_SCHEMA.items():
        for key, spec in keys.items():
            if key in merged:
                resolved[key] = merged[key]
            elif spec["required"]:
                raise ConfigError("required key missing", field=key)
            else:
                resolved[key] = spec["default"]

    try:
        model = ModelParams(
            R=resolved["R"],
            lam=resolved["lambda"],
            delta=resolved["delta"],
            mu=resolved["mu"],
            gamma=resolved["gamma"],
        )
    except ValueError as e:
        raise ConfigError(str(e), field="model") from e

    n_max = resolved["n_max"]
    if n_max is None:
        n_max = max(1, math.ceil(4.0 * model.R))
    try:
        fock = FockConfig(n_max=n_max, tail_tol=resolved["tail_tol"])
    except ValueError as e:
        raise ConfigError(str(e), field="fock") from e

    try:
        plan = PropagatorPlan(
            method=resolved["method"],
            dt=resolved["dt"],
            t_max=resolved["t_max"],
            krylov_dim=resolved["krylov_dim"],
            step_tol=resolved["step_tol"],
        )
    except ValueError as e:
        raise ConfigError(str(e), field="plan") from e

    outputs = resolved["outputs"] or DEFAULT_OUTPUTS
    return RunConfig(model=model, fock=fock, plan=plan, outputs=tuple(outputs))


def parse_config(text: str, overrides: dict[str, Any] | None = None) -> RunConfig:
    """
    Parse configuration text into a validated RunConfig.

    Parameters
    ----------
    text : str
        ``key=value`` configuration text.
    overrides : Dict[str, Any], optional
        Command-line values winning over the text.

    Returns
    -------
    RunConfig
        Validated configuration.

    Examples
    --------
    >>> cfg = parse_config("R=100, lambda=0.75, delta=0.5, mu=1.3e-3")
    >>> cfg.fock.n_max
    400
    """
    return build_run_config(_parse_text(text), overrides)


def load_config(
    path: str | Path | None = None, overrides: dict[str, Any] | None = None
) -> RunConfig:
    """
    Load a configuration file (or flags only) into a RunConfig.

    ``.yml``/``.yaml`` files are read with ``yaml.safe_load``; any other
    suffix is parsed as ``key=value`` text.

    Parameters
    ----------
    path : str or Path, optional
        Configuration file. ``None`` builds the config from overrides alone.
    overrides : Dict[str, Any], optional
        Command-line values.

    Raises
    ------
    FileNotFoundError
        If the file does not exist.
    ConfigError
        On any parse or validation problem.
    """
    if path is None:
        return build_run_config({}, overrides)

    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")

    if path.suffix.lower() in (".yml", ".yaml"):
        with open(path) as f:
            data = yaml.safe_load(f) or {}
        if not isinstance(data, dict):
            raise ConfigError(f"YAML config must be a mapping, got {type(data).__name__}")
        values = _flatten_mapping(data)
    else:
        values = _parse_text(path.read_text())

    logger.debug(f"Loaded config {path} with keys {sorted(values)}")
    return build_run_config(values, overrides)


def run_config_from_dict(data: dict[str, Any]) -> RunConfig:
    """Rebuild a RunConfig from ``RunConfig.to_dict`` output (metadata sidecars)."""
    return build_run_config(_flatten_mapping(data))
