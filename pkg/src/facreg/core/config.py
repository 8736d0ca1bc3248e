"""
Configuration for facreg

Pydantic schema for the regularizer/solver settings, loaded from TOML or YAML.

Usage:
    >>> config = load_config("facreg.toml")
    >>> config.solver.time_limit_s
    300.0
"""

from __future__ import annotations

import logging
import sys
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Union

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from facreg.errors import ConfigError
from facreg.models.spaces import Attribute

logger = logging.getLogger(__name__)


class WeightMode(str, Enum):
    """How the regularization weights are chosen"""
    AUTO = "auto"
    MANUAL = "manual"


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class AttributeWeights(_Strict):
    """One non-negative weight per geometric attribute"""
    p: float = Field(default=1.0, ge=0)
    z: float = Field(default=1.0, ge=0)
    w: float = Field(default=1.0, ge=0)
    h: float = Field(default=1.0, ge=0)
    o: float = Field(default=1.0, ge=0)

    def get(self, attribute: Attribute) -> float:
        return float(getattr(self, attribute.value))


class WeightsConfig(_Strict):
    """
    Category weights. In auto mode omega_a is auto_gain times the
    attribute's data cost at the nearest candidates.
    """
    mode: WeightMode = WeightMode.AUTO
    omega: AttributeWeights = AttributeWeights()
    data_scale: AttributeWeights = AttributeWeights()
    auto_gain: float = Field(default=3.0, gt=0)


class PruningConfig(_Strict):
    enabled: bool = True
    prune_radius_factor: float = Field(default=5.0, gt=0)


class SolverConfig(_Strict):
    """Branch-and-bound settings"""
    time_limit_s: float = Field(default=300.0, gt=0)
    workers: int = Field(default=1, ge=1)
    log_level: str = "INFO"


class Config(_Strict):
    """Top-level settings for regularize()"""
    weights: WeightsConfig = WeightsConfig()
    pruning: PruningConfig = PruningConfig()
    solver: SolverConfig = SolverConfig()
    report_unpruned: bool = True

    @property
    def prune_radius_factor(self) -> Optional[float]:
        return self.pruning.prune_radius_factor if self.pruning.enabled else None

    def with_pruning(self, enabled: bool) -> "Config":
        return self.model_copy(
            update={"pruning": self.pruning.model_copy(update={"enabled": enabled})}
        )

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


def _read(path: Path) -> Dict[str, Any]:
    suffix = path.suffix.lower()
    try:
        if suffix == ".toml":
            with path.open("rb") as fh:
                return tomllib.load(fh)
        if suffix in (".yaml", ".yml"):
            with path.open("r", encoding="utf-8") as fh:
                data = yaml.safe_load(fh)
            return data or {}
    except OSError as e:
        raise ConfigError(f"{path}: {e}") from e
    except (tomllib.TOMLDecodeError, yaml.YAMLError) as e:
        raise ConfigError(f"{path}: {e}") from e
    raise ConfigError(f"{path}: unsupported config format {suffix!r} (use .toml or .yaml)")


def parse_config(data: Dict[str, Any], source: str = "<config>") -> Config:
    """
    Validate a config mapping.

    Raises:
        ConfigError: Naming the dotted key of the first problem
    """
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a table")
    try:
        return Config.model_validate(data)
    except ValidationError as e:
        err = e.errors()[0]
        key = ".".join(str(part) for part in err["loc"]) or "<root>"
        raise ConfigError(f"{source}: {key}: {err['msg']}") from e


def load_config(path: Optional[Union[str, Path]] = None) -> Config:
    """Load a TOML/YAML config; no path gives the defaults"""
    if path is None:
        return Config()
    path = Path(path)
    config = parse_config(_read(path), str(path))
    logger.debug("Loaded config from %s", path)
    return config
