"""
Configuration resolution.

Built-in dataclass defaults < key-value config file (--config) < explicit
command-line flags. The config file uses dotenv syntax (KEY=value per line,
# comments); keys are case-insensitive and "-" equals "_", so "nf=32",
"NF=32" and "mds-dim = 3" all work. AMIF_N_JOBS in the environment or a
.env file sets the default worker count.
"""

import dataclasses
import os
import typing
from typing import Any, Dict, Optional, Type

from dotenv import dotenv_values, load_dotenv

from src.errors import ConfigError

load_dotenv()

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def normalize_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def default_n_jobs() -> int:
    raw = os.getenv("AMIF_N_JOBS", "1")
    try:
        return int(raw)
    except ValueError as e:
        raise ConfigError(f"AMIF_N_JOBS must be an integer, got {raw!r}") from e


def load_config_file(path: str) -> Dict[str, str]:
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    values = dotenv_values(path)
    return {normalize_key(k): v for k, v in values.items() if v is not None}


def _coerce(name: str, raw: Any, target: Any) -> Any:
    """Convert a config-file string (or flag value) to the field's type."""
    if raw is None:
        return None
    origin = typing.get_origin(target)
    if origin is typing.Union:
        args = [a for a in typing.get_args(target) if a is not type(None)]
        if isinstance(raw, str) and raw.strip().lower() in {"", "none", "null"}:
            return None
        target = args[0]
    try:
        if target is bool:
            if isinstance(raw, bool):
                return raw
            text = str(raw).strip().lower()
            if text in _TRUE:
                return True
            if text in _FALSE:
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if target is int:
            if isinstance(raw, float) and not raw.is_integer():
                raise ValueError(f"not an integer: {raw!r}")
            return int(raw) if not isinstance(raw, str) else int(raw.strip())
        if target is float:
            return float(raw)
        if target is str:
            return str(raw).strip() if isinstance(raw, str) else str(raw)
    except ValueError as e:
        raise ConfigError(f"option {name!r}: {e}") from e
    return raw


def resolve_options(
    options_cls: Type,
    file_values: Optional[Dict[str, str]] = None,
    flag_values: Optional[Dict[str, Any]] = None,
):
    """
    Build an options dataclass from config-file and flag values.

    Unknown config-file keys are an error, so a typo never silently falls
    back to a default.
    """
    hints = typing.get_type_hints(options_cls)
    known = {f.name for f in dataclasses.fields(options_cls)}
    merged: Dict[str, Any] = {}

    for key, raw in (file_values or {}).items():
        key = normalize_key(key)
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        merged[key] = _coerce(key, raw, hints[key])
    for key, value in (flag_values or {}).items():
        merged[key] = _coerce(key, value, hints[key])

    try:
        return options_cls(**merged)
    except TypeError as e:
        raise ConfigError(str(e)) from e
