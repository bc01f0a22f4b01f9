"""Runtime settings: tolerances, step budget and worker count.

Every default lives as a constant in the module that owns the concern; this
model only gathers them so a YAML file (``--config``) can override them.
"""

from pathlib import Path
from typing import Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field
from pydantic import ValidationError as PydanticValidationError

from .exceptions import ConfigError
from .integrator import MAX_STEPS, PRECISION_FLOOR, SETTLE_RATE_TOLERANCE
from .model import DEGENERACY_TOLERANCE, FIXED_POINT_TOLERANCE


class Settings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    fixed_point_tolerance: float = Field(default=FIXED_POINT_TOLERANCE, gt=0)
    degeneracy_tolerance: float = Field(default=DEGENERACY_TOLERANCE, gt=0)
    max_steps: int = Field(default=MAX_STEPS, ge=1)
    precision_floor: float = Field(default=PRECISION_FLOOR, gt=0)
    settle_rate_tolerance: float = Field(default=SETTLE_RATE_TOLERANCE, gt=0)
    max_workers: int = Field(default=4, ge=1)


DEFAULT_SETTINGS = Settings()


def load_settings(path: Optional[Union[str, Path]] = None) -> Settings:
    """Load settings from a YAML mapping, or the defaults when no path is given."""
    if path is None:
        return DEFAULT_SETTINGS

    path = Path(path)
    try:
        with open(path, "r") as f:
            data = yaml.safe_load(f) or {}
    except OSError as e:
        raise ConfigError(f"Could not read settings file {path}: {e}")
    except yaml.YAMLError as e:
        raise ConfigError(f"Settings file {path} is not valid YAML: {e}")

    if not isinstance(data, dict):
        raise ConfigError(f"Settings file {path} must contain a mapping")

    try:
        return Settings(**data)
    except PydanticValidationError as e:
        raise ConfigError(f"Invalid settings in {path}: {e}")
