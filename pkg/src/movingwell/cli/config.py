from __future__ import annotations

import json
import tomllib
from collections.abc import Mapping
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from movingwell.core import MovingWellError, PhysicalParams, WellConvention

type OutputFormat = Literal["csv", "json"]
type ComplexPair = tuple[float, float]

_DEFAULT_WIDTH = 1.0


class ConfigError(MovingWellError):
    """The run configuration could not be read or failed validation."""


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class PhysicsConfig(_Section):
    m: float = Field(default=1.0, ge=0.0)
    hbar: float = Field(default=1.0, gt=0.0)
    c: float = Field(default=1.0, gt=0.0)
    V0: float | None = None
    # None: 1.0 for the static and offset wells, v*t0 for the moving one.
    L0: float | None = Field(default=None, gt=0.0)
    v: float = 0.0
    t0: float = 1.0
    well_convention: WellConvention = "static"
    superluminal_study: bool = False

    def to_params(self) -> PhysicalParams:
        """Convention checks, including L0 = v*t0 for the moving well, happen in ``PhysicalParams``."""

        width = self.L0
        if width is None:
            width = self.v * self.t0 if self.well_convention == "moving" else _DEFAULT_WIDTH
        return PhysicalParams(
            m=self.m,
            hbar=self.hbar,
            c=self.c,
            V0=self.V0,
            L0=width,
            v=self.v,
            t0=self.t0,
            well_convention=self.well_convention,
            superluminal_study=self.superluminal_study,
        )


class GridConfig(_Section):
    t_lo: float = Field(default=1.0, gt=0.0)
    t_hi: float = Field(default=2.0, gt=0.0)
    nz: int = Field(default=64, ge=2, le=4096)
    nt: int = Field(default=64, ge=1, le=4096)
    margin: float = Field(default=0.05, ge=0.0, lt=0.5)


class BoundStatesConfig(_Section):
    scan_points: int | None = Field(default=None, ge=16)


class ScatterConfig(_Section):
    E_min: float = 2.0
    E_max: float = 4.0
    n_energies: int = Field(default=21, ge=1, le=100_000)
    energies: list[float] | None = None

    def energy_list(self) -> list[float]:
        if self.energies is not None:
            return list(self.energies)
        if self.n_energies == 1:
            return [self.E_min]
        step = (self.E_max - self.E_min) / (self.n_energies - 1)
        return [self.E_min + index * step for index in range(self.n_energies)]


class ModesConfig(_Section):
    n: list[int] = Field(default_factory=lambda: [1])
    cJ: ComplexPair = (1.0, 0.0)
    cY: ComplexPair = (0.0, 0.0)

    @field_validator("n")
    @classmethod
    def _positive(cls, value: list[int]) -> list[int]:
        if not value or any(index < 1 for index in value):
            raise ValueError("mode indices must be positive integers")
        return value

    @property
    def cJ_complex(self) -> complex:
        return complex(*self.cJ)

    @property
    def cY_complex(self) -> complex:
        return complex(*self.cY)


class MomentumConfig(_Section):
    source: Literal["integer-order", "plane-wave"] = "integer-order"
    nu: int = Field(default=1, ge=1)
    c1: ComplexPair = (1.0, 0.0)
    z_lo_fraction: float = Field(default=0.05, gt=-1.0, lt=1.0)
    z_hi_fraction: float = Field(default=0.95, gt=-1.0, lt=1.0)
    n_points: int | None = Field(default=None, ge=17)
    plane_wave_k: float = 1.0


class VerifyConfig(_Section):
    checks: list[str] | None = None
    inject_stencil_bug: bool = False


class RunConfig(_Section):
    physics: PhysicsConfig = Field(default_factory=PhysicsConfig)
    grid: GridConfig = Field(default_factory=GridConfig)
    bound_states: BoundStatesConfig = Field(default_factory=BoundStatesConfig)
    scatter: ScatterConfig = Field(default_factory=ScatterConfig)
    modes: ModesConfig = Field(default_factory=ModesConfig)
    momentum: MomentumConfig = Field(default_factory=MomentumConfig)
    verify: VerifyConfig = Field(default_factory=VerifyConfig)
    format: Literal["csv", "json"] = "csv"
    out: str | None = None
    threads: int = Field(default=1, ge=1, le=256)
    seed: int = Field(default=0, ge=0)

    def canonical_json(self) -> str:
        """Resolved config with sorted keys; embedded in every output header."""

        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))


def _merge(base: dict[str, Any], overrides: Mapping[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, Mapping) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _validation_detail(exc: ValidationError) -> str:
    parts: list[str] = []
    for error in exc.errors():
        location = ".".join(str(item) for item in error["loc"])
        parts.append(f"{location}: {error['msg']}")
    return "; ".join(parts)


def load_run_config(
    path: Path | None,
    overrides: Mapping[str, Any] | None = None,
    *,
    defaults: Mapping[str, Any] | None = None,
) -> RunConfig:
    """Read a TOML run file (optional) over ``defaults`` and apply flag overrides; flags win."""

    raw: dict[str, Any] = {}
    if path is not None:
        try:
            with path.open("rb") as handle:
                raw = tomllib.load(handle)
        except OSError as exc:
            raise ConfigError("config_unreadable", f"{path}: {exc.strerror}", {"path": str(path)}) from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError("config_not_toml", f"{path}: {exc}", {"path": str(path)}) from exc
    merged = _merge(_merge(dict(defaults or {}), raw), overrides or {})
    try:
        return RunConfig.model_validate(merged)
    except ValidationError as exc:
        raise ConfigError(
            "config_invalid",
            _validation_detail(exc),
            {"errors": exc.error_count()},
        ) from exc
