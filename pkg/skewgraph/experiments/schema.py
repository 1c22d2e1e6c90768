"""Experiment configuration: TOML files checked against a pydantic schema.

A configuration names a system (a preset with overrides, or inline fiber maps), an optional
base transition matrix, one experiment kind with its parameters, a seed and an output
directory. Rationals are written as "p/q" strings so exact map parameters survive.
"""

import hashlib
import json
import logging
import sys
from enum import Enum
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from pydantic import BaseModel, ConfigDict, Field
from pydantic import ValidationError as PydanticValidationError

from skewgraph.exceptions import ValidationError

logger = logging.getLogger(__name__)

Scalar = str | int | float


class ExperimentKind(str, Enum):
    CODE = "code"
    SPINE = "spine"
    TARGET = "target"
    SPLIT_CHECK = "split-check"
    DECAY = "decay"
    WASSERSTEIN_CURVE = "wasserstein-curve"
    SYNC_CURVE = "sync-curve"
    OMEGA = "omega"
    GRAPH_SAMPLE = "graph-sample"
    MILNOR = "milnor"
    DISINTEGRATION = "disintegration"
    PERTURBATION = "perturbation"


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class MapConfig(_Strict):
    """One fiber map: graph vertices for m = 1, or one factor per coordinate."""

    x: list[Scalar] | None = None
    y: list[Scalar] | None = None
    factors: list["MapConfig"] | None = None


class SystemConfig(_Strict):
    preset: str | None = None
    overrides: dict[str, Any] = Field(default_factory=dict)
    maps: list[MapConfig] | None = None
    name: str = "custom"


class BaseMeasureConfig(_Strict):
    transition: list[list[Scalar]]
    stationary: list[Scalar] | None = None


class WindowConfig(_Strict):
    """A base point θ.

    ``past`` lists θ_{-1}, θ_{-2}, ... nearest first and ``tail`` continues it periodically;
    ``future`` and ``future_tail`` do the same for θ_0, θ_1, .... With ``disjunctive`` set the
    forward part enumerates every word up to that length. With neither tail nor disjunctive
    the window is a stationary sample drawn from the seed.
    """

    past: list[int] = Field(default_factory=list)
    tail: list[int] | None = None
    future: list[int] = Field(default_factory=list)
    future_tail: list[int] | None = None
    disjunctive: int | None = None


class CylinderConfig(_Strict):
    """A cylinder [start; word] checked after n pushforward steps."""

    start: int
    word: list[int]
    n: int = 1


class ParametersConfig(_Strict):
    theta: WindowConfig = Field(default_factory=WindowConfig)
    x: list[Scalar] | Scalar | None = None
    depth: int | None = None
    depths: list[int] | None = None
    max_depth: int | None = None
    max_iter: int | None = None
    tol: float | None = None
    exact: bool = False
    base: str = "target"
    words: list[list[int]] | None = None
    n_words: int = 0
    max_length: int = 20
    n_samples: int = 1000
    n_atoms: int = 100
    n_points: int = 100
    word_length: int | None = None
    base_depth: int | None = None
    fiber_law: str = "uniform"
    grid_size: int = 8
    reference: str = "fresh"
    measure_path: str | None = None
    burn_in: int = 0
    n_iter: int = 10_000
    cylinder_depth: int = 3
    cylinders: list[CylinderConfig] | None = None
    n_checks: int = 20
    max_n: int = 5
    delta: float | None = None
    seeds: list[int] = Field(default_factory=lambda: [0, 1, 2, 3, 4])


class ExperimentConfig(_Strict):
    system: SystemConfig
    base: BaseMeasureConfig | None = None
    experiment: ExperimentKind
    parameters: ParametersConfig = Field(default_factory=ParametersConfig)
    seed: int | None = None
    output: str | None = None


def _location(loc: tuple) -> str:
    return ".".join(str(part) for part in loc)


def parse_config(data: dict[str, Any]) -> tuple[ExperimentConfig | None, list[str]]:
    """Check the raw mapping against the schema; findings name the offending key."""
    try:
        return ExperimentConfig.model_validate(data), []
    except PydanticValidationError as e:
        return None, [f"{_location(err['loc'])}: {err['msg']}" for err in e.errors()]


def load_config_data(path: Path | str) -> dict[str, Any]:
    """
    Read a TOML configuration file.

    Raises:
        ValidationError: If the file is missing or not valid TOML
    """
    try:
        with open(path, "rb") as handle:
            data = tomllib.load(handle)
    except OSError as e:
        raise ValidationError(f"Cannot read config {path}: {e}", "config") from e
    except tomllib.TOMLDecodeError as e:
        raise ValidationError(f"Config {path} is not valid TOML: {e}", "config") from e
    logger.debug(f"Loaded config {path} with keys {sorted(data)}")
    return data


def config_digest(config: ExperimentConfig) -> str:
    """sha256 of the resolved configuration in canonical JSON form."""
    canonical = json.dumps(config.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
