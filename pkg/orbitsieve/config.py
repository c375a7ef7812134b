# Copyright 2026 Thin Orbit Sieve Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""
Run configuration.

Values are layered, later sources winning: built-in defaults, a key=value
file, ORBIT_SIEVE_* environment variables (a local .env is loaded first),
and explicit command-line flags. The same key=value format is written back
by RunConfig.to_env_text().
"""

import hashlib
import json
import logging
import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

from dotenv import dotenv_values, load_dotenv
from pydantic import Field, ValidationError, field_validator, model_validator

from .constants import Constants
from .errors import DomainError
from .group_core import build_presentation, load_presentation, parse_generator_rows
from .models.orbit_base import GroupPresentation, OrbitSieveModel, Rational
from .spectral import resolve_theta

logger = logging.getLogger(__name__)

# Keys that only say where or how fast to compute; they never change results.
_VOLATILE_KEYS = {"out_dir", "cache_dir", "workers"}


def _split_list(value: Any) -> Any:
    if isinstance(value, str):
        return tuple(part.strip() for part in value.split(",") if part.strip())
    return value


def _blank_to_none(value: Any) -> Any:
    if isinstance(value, str) and not value.strip():
        return None
    return value


class RunConfig(OrbitSieveModel):
    """All parameters of a pipeline run."""

    group: str = Constants.DEFAULT_PRESENTATION
    generators: str | None = None
    cusp_width: int | None = Field(default=None, ge=1)
    height: Rational = Fraction(Constants.DEFAULT_HEIGHT)
    epsilon: Rational | None = None
    beta: Rational = Fraction(Constants.DEFAULT_BETA)
    prime_bound: int = Field(default=Constants.DEFAULT_PRIME_BOUND, ge=2)
    level_q: int | None = Field(default=None, ge=1)
    sift_z: float | None = Field(default=None, ge=2)
    r_list: tuple[int, ...] = Constants.DEFAULT_R_LIST
    theta: str = Constants.DEFAULT_THETA
    delta: float | None = Field(default=None, gt=0, le=1)
    growth_heights: tuple[Rational, ...] = ()
    node_cap: int = Field(default=Constants.DEFAULT_NODE_CAP, ge=1)
    workers: int = Field(default=1, ge=1)
    out_dir: str = "out"
    cache_dir: str = ".orbit_cache"
    word_cap: int = Field(default=Constants.DEFAULT_WORD_CAP, ge=1)

    @field_validator("generators", "cusp_width", "epsilon", "level_q", "sift_z", "delta", mode="before")
    @classmethod
    def _optional(cls, v: Any) -> Any:
        return _blank_to_none(v)

    @field_validator("r_list", "growth_heights", mode="before")
    @classmethod
    def _lists(cls, v: Any) -> Any:
        return _split_list(v)

    @field_validator("theta", mode="before")
    @classmethod
    def _theta(cls, v: Any) -> str:
        v = str(v).strip()
        resolve_theta(v)
        return v

    @model_validator(mode="after")
    def _check_ranges(self) -> "RunConfig":
        if self.height <= 0:
            raise ValueError("height must be positive")
        if self.beta < 1:
            raise ValueError("beta must be at least 1")
        if self.epsilon is not None and not 0 < self.epsilon < Fraction(1, 2):
            raise ValueError("epsilon must lie in (0, 1/2)")
        if any(r < 1 for r in self.r_list):
            raise ValueError("every R must be a positive integer")
        if any(t <= 1 or t > self.height for t in self.growth_heights):
            raise ValueError("growth heights must lie in (1, height]")
        if self.generators is not None and self.cusp_width is None:
            raise ValueError("inline generators need a cusp_width")
        return self

    @property
    def theta_value(self) -> Fraction:
        return resolve_theta(self.theta)

    def effective_growth_heights(self) -> tuple[Fraction, ...]:
        """Configured growth heights, or a quarter-decade grid from 100 up to the run height."""
        if self.growth_heights:
            return tuple(sorted(set(self.growth_heights)))
        heights = []
        j = 8
        while True:
            t = Fraction(round(10 ** (j / 4)))
            if t > self.height:
                break
            heights.append(t)
            j += 1
        return tuple(heights)

    def presentation(self) -> GroupPresentation:
        if self.generators is not None:
            return build_presentation(
                self.group, parse_generator_rows(self.generators), self.cusp_width, word_cap=self.word_cap
            )
        return load_presentation(self.group, self.word_cap)

    def to_env_text(self) -> str:
        """key=value lines readable by load_run_config."""
        lines = []
        for key, value in self.model_dump(mode="json").items():
            if value is None:
                text = ""
            elif isinstance(value, (list, tuple)):
                text = ",".join(str(v) for v in value)
            else:
                text = str(value)
            if any(ch in text for ch in " ;#"):
                text = f'"{text}"'
            lines.append(f"{key}={text}")
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        """SHA-256 of the result-relevant settings."""
        payload = self.model_dump(mode="json", exclude=_VOLATILE_KEYS)
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _from_environment(environ: Mapping[str, str]) -> dict[str, str]:
    prefix = Constants.ENV_PREFIX
    return {k[len(prefix):].lower(): v for k, v in environ.items() if k.startswith(prefix)}


def load_run_config(
    config_file: str | Path | None = None,
    overrides: Mapping[str, Any] | None = None,
    environ: Mapping[str, str] | None = None,
) -> RunConfig:
    """Layer defaults, file, environment and explicit overrides into a RunConfig.

    Raises:
        DomainError: a value is missing, malformed or out of range
    """
    if environ is None:
        load_dotenv()
        environ = os.environ
    values: dict[str, Any] = {}
    if config_file is not None:
        path = Path(config_file)
        if not path.is_file():
            raise DomainError(f"config file {path} does not exist")
        values.update({k.lower(): v for k, v in dotenv_values(path).items() if v is not None})
    values.update(_from_environment(environ))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})

    known = set(RunConfig.model_fields)
    unknown = sorted(set(values) - known)
    if unknown:
        logger.warning("ignoring unknown config keys: %s", ", ".join(unknown))
    try:
        return RunConfig(**{k: v for k, v in values.items() if k in known})
    except ValidationError as exc:
        raise DomainError(
            f"invalid configuration: {exc.error_count()} error(s)",
            {"errors": [{"field": ".".join(map(str, e["loc"])), "message": e["msg"]} for e in exc.errors()]},
        ) from exc
