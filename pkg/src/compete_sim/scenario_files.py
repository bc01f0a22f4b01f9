"""Scenario file loading.

Two layouts are accepted, both with the same flat set of keys:

* ``key=value`` lines with ``#`` comments (any extension other than YAML)
* a YAML mapping (``.yaml`` / ``.yml``)

Keys left out inherit the situation 1 base case; ``name`` defaults to the file
stem. Unknown keys are rejected so that typos do not silently fall back to
defaults.
"""

from pathlib import Path
from typing import Any, Dict, Union

import yaml
from pydantic import ValidationError as PydanticValidationError

from .exceptions import ScenarioFileError, ValidationError
from .scenarios import Scenario, builtin_scenario

FLOAT_KEYS = (
    "r1", "r2", "n1", "n2", "s1", "s2",
    "x0", "y0", "h", "t_end", "saturation_fraction", "reserve_days",
)
INT_KEYS = ("record_stride",)
TEXT_KEYS = ("name", "method", "description", "units")
SCENARIO_KEYS = FLOAT_KEYS + INT_KEYS + TEXT_KEYS

YAML_SUFFIXES = (".yaml", ".yml")


def _coerce(key: str, value: Any, where: str) -> Any:
    if key not in SCENARIO_KEYS:
        raise ScenarioFileError(
            f"{where}: unknown key '{key}' "
            f"(expected one of: {', '.join(SCENARIO_KEYS)})"
        )
    try:
        if key in FLOAT_KEYS:
            return float(value)
        if key in INT_KEYS:
            return int(value)
    except (TypeError, ValueError):
        raise ScenarioFileError(f"{where}: '{key}' must be a number, got {value!r}")
    return str(value).strip()


def parse_key_values(text: str, source: str = "<string>") -> Dict[str, Any]:
    """Parse ``key=value`` lines into typed values."""
    values: Dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        if "=" not in line:
            raise ScenarioFileError(f"{where}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in values:
            raise ScenarioFileError(f"{where}: duplicate key '{key}'")
        values[key] = _coerce(key, value, where)
    return values


def parse_yaml(text: str, source: str = "<string>") -> Dict[str, Any]:
    """Parse a flat YAML mapping into typed values."""
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as e:
        raise ScenarioFileError(f"{source}: invalid YAML: {e}")
    if not isinstance(data, dict):
        raise ScenarioFileError(f"{source}: expected a mapping of scenario keys")
    return {str(k): _coerce(str(k), v, source) for k, v in data.items()}


def build_scenario(values: Dict[str, Any], default_name: str, source: str) -> Scenario:
    """Apply parsed values on top of the situation 1 base case."""
    overrides = dict(values)
    overrides.setdefault("name", default_name)
    try:
        return builtin_scenario("situation1").with_overrides(**overrides)
    except (PydanticValidationError, ValidationError) as e:
        raise ScenarioFileError(f"{source}: invalid scenario: {e}")


def load_scenario_file(path: Union[str, Path]) -> Scenario:
    """Read a scenario file from disk."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioFileError(f"Could not read scenario file {path}: {e}")

    if path.suffix.lower() in YAML_SUFFIXES:
        values = parse_yaml(text, str(path))
    else:
        values = parse_key_values(text, str(path))
    return build_scenario(values, default_name=path.stem, source=str(path))
