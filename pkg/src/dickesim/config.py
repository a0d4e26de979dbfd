"""Run configuration: strict, versioned JSON.

Unknown keys are rejected everywhere so a typo cannot silently fall back
to a default. Initial conditions are given as atomic coordinates
normalized by sqrt(4J), which keeps configs independent of J.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .hilbert import ModelParams

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    pass


class ModelSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    omega0: float = Field(gt=0)
    omega_a: float = Field(gt=0)
    G: float
    Gp: float
    J: float = Field(gt=0)
    n_max: int = Field(default=120, ge=1)

    @model_validator(mode="after")
    def _check_half_integer(self):
        if abs(2 * self.J - round(2 * self.J)) > 1e-9:
            raise ValueError("2J must be an integer")
        return self

    def to_params(self) -> ModelParams:
        return ModelParams(
            omega0=self.omega0,
            omega_a=self.omega_a,
            G=self.G,
            Gp=self.Gp,
            J=self.J,
            n_max=self.n_max,
        )


class InitialCondition(BaseModel):
    """Atomic start point; qa, pa are q_a/sqrt(4J) and p_a/sqrt(4J)."""

    model_config = ConfigDict(extra="forbid")

    label: str = Field(min_length=1)
    qa: float
    pa: float

    @model_validator(mode="after")
    def _inside_unit_disk(self):
        if self.qa**2 + self.pa**2 >= 1.0:
            raise ValueError(
                f"initial condition {self.label!r}: qa^2+pa^2 must be < 1"
            )
        return self

    def atomic_point(self, J: float) -> tuple[float, float]:
        scale = math.sqrt(4.0 * J)
        return self.qa * scale, self.pa * scale


class TimeGrid(BaseModel):
    model_config = ConfigDict(extra="forbid")

    t_start: float = 0.0
    t_end: float = Field(gt=0)
    dt: float = Field(gt=0)

    @model_validator(mode="after")
    def _ordered(self):
        if self.t_end <= self.t_start:
            raise ValueError("t_end must exceed t_start")
        return self


class WignerGridSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_theta: int = Field(default=128, ge=2)
    n_phi: int = Field(default=256, ge=2)


class SnapshotSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    policy: Literal["ale-extrema", "fixed-times"] = "ale-extrema"
    times: Optional[list[float]] = None

    @model_validator(mode="after")
    def _times_match_policy(self):
        if self.policy == "fixed-times" and not self.times:
            raise ValueError("fixed-times policy requires a non-empty times list")
        if self.policy == "ale-extrema" and self.times:
            raise ValueError("ale-extrema policy does not take explicit times")
        return self


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: int
    model: ModelSection
    energy: float
    initial_conditions: list[InitialCondition] = Field(min_length=1)
    time_grid: TimeGrid
    wigner_grid: WignerGridSection = WignerGridSection()
    snapshots: SnapshotSection = SnapshotSection()
    poincare_crossings: int = Field(default=500, ge=1)
    out_dir: Optional[str] = None

    @model_validator(mode="after")
    def _version_supported(self):
        if self.schema_version != SCHEMA_VERSION:
            raise ValueError(
                f"unsupported schema_version {self.schema_version}; "
                f"this build reads version {SCHEMA_VERSION}"
            )
        labels = [ic.label for ic in self.initial_conditions]
        if len(set(labels)) != len(labels):
            raise ValueError("initial condition labels must be unique")
        return self

    def canonical_json(self) -> str:
        return json.dumps(self.model_dump(), sort_keys=True, separators=(",", ":"))


def parse_config(path: str | Path) -> RunConfig:
    """Read and validate a JSON run configuration."""
    p = Path(path)
    try:
        raw = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}: malformed JSON at line {exc.lineno}: {exc.msg}") from exc
    try:
        return RunConfig.model_validate(doc)
    except ValidationError as exc:
        lines = []
        for err in exc.errors():
            loc = ".".join(str(part) for part in err["loc"]) or "<root>"
            lines.append(f"{loc}: {err['msg']}")
        raise ConfigError(f"{p}: invalid config: " + "; ".join(lines)) from exc
