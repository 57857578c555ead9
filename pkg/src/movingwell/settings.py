from __future__ import annotations

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="MOVINGWELL_",
        case_sensitive=False,
        env_file=".env",
        env_file_encoding="utf-8",
    )

    # Logging
    log_level: str = "INFO"
    log_json: bool = False

    # Special functions: relative accuracy every Bessel evaluation must certify.
    bessel_tolerance: float = Field(default=1e-10, gt=0.0, lt=1e-3)

    # Finite-difference oracle step policy: h = fd_relative_step * max(|coord|, fd_floor).
    fd_relative_step: float = Field(default=3e-3, gt=0.0, lt=0.5)
    fd_floor: float = Field(default=1.0, gt=0.0)
    # Relative residuals are divided by max(scale, residual_floor).
    residual_floor: float = Field(default=1e-30, ge=0.0)

    # Points closer than near_cone_tolerance * ct to the light cone are rejected.
    near_cone_tolerance: float = Field(default=1e-12, gt=0.0, lt=1e-3)

    # Static well
    bound_scan_points: int = Field(default=2000, ge=16)
    bound_bisection_tolerance: float = Field(default=1e-10, gt=0.0)

    # Observables
    quadrature_points: int = Field(default=513, ge=17)
    momentum_refinement_tolerance: float = Field(default=1e-4, gt=0.0)

    # Grid work is split into panels and run on this many threads.
    default_threads: int = Field(default=1, ge=1, le=256)


def get_settings() -> Settings:
    return Settings()
