"""Shared domain types, the natural-units policy and the error taxonomy.

Every formula in the package is homogeneous in ħ and c, so callers may work in
any consistent unit system. The CLI rescales to natural units (ħ = c = 1 and
m ∈ {0, 1}) before computing and maps results back with ``to_user_units``.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np
from numpy.typing import NDArray

type WellConvention = Literal["static", "moving", "offset"]
type RealArray = NDArray[np.float64]
type ComplexArray = NDArray[np.complex128]
type ScalarSampler = Callable[[RealArray, RealArray], ComplexArray]
type PairSampler = Callable[[RealArray, RealArray], tuple[ComplexArray, ComplexArray]]
type Potential = Callable[[RealArray], RealArray]

_L0_MATCH_TOLERANCE = 1e-12


@dataclass(slots=True)
class MovingWellError(Exception):
    reason_code: str
    detail: str = ""
    context: dict[str, object] = field(default_factory=dict)

    def __str__(self) -> str:
        if self.detail:
            return f"{self.reason_code}: {self.detail}"
        return self.reason_code


class DomainError(MovingWellError):
    """A precondition on the inputs was violated."""


class DegenerateGeometryError(DomainError):
    """The well geometry collapses (e.g. v = 0 makes both walls coincide in x)."""


class ConvergenceError(MovingWellError):
    """An iteration (root bracketing, grid refinement) failed to settle."""


class AccuracyError(MovingWellError):
    """A computed value could not be certified to the requested accuracy."""


@dataclass(frozen=True, slots=True)
class UnitScales:
    """Size of one natural unit expressed in user units."""

    mass: float = 1.0
    length: float = 1.0
    time: float = 1.0
    energy: float = 1.0
    action: float = 1.0
    speed: float = 1.0

    def is_identity(self) -> bool:
        return all(
            value == 1.0
            for value in (self.mass, self.length, self.time, self.energy, self.action, self.speed)
        )

    def compose(self, inner: UnitScales) -> UnitScales:
        return UnitScales(
            mass=self.mass * inner.mass,
            length=self.length * inner.length,
            time=self.time * inner.time,
            energy=self.energy * inner.energy,
            action=self.action * inner.action,
            speed=self.speed * inner.speed,
        )


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise DomainError("non_finite_parameter", f"{name} must be finite", {name: value})


@dataclass(frozen=True, slots=True)
class PhysicalParams:
    """Particle constants and well geometry.

    ``V0 = None`` stands for infinitely high walls. ``well_convention`` selects
    region II: ``static`` is (0, L0), ``moving`` is [0, vt] and requires
    L0 = v·t0, ``offset`` is (0, L0 + v(t - t0)).
    """

    m: float
    hbar: float = 1.0
    c: float = 1.0
    V0: float | None = None
    L0: float = 1.0
    v: float = 0.0
    t0: float = 0.0
    well_convention: WellConvention = "static"
    superluminal_study: bool = False
    units: UnitScales = field(default_factory=UnitScales)

    def __post_init__(self) -> None:
        for name in ("m", "hbar", "c", "L0", "v", "t0"):
            _require_finite(name, float(getattr(self, name)))
        if self.V0 is not None:
            _require_finite("V0", self.V0)
        if self.m < 0:
            raise DomainError("negative_mass", "m must be >= 0", {"m": self.m})
        if self.hbar <= 0 or self.c <= 0:
            raise DomainError("nonpositive_constant", "hbar and c must be > 0")
        if self.L0 <= 0:
            raise DomainError("nonpositive_width", "L0 must be > 0", {"L0": self.L0})
        self._validate_wall_speed()
        if self.well_convention == "moving":
            expected = self.v * self.t0
            if abs(self.L0 - expected) > _L0_MATCH_TOLERANCE * max(abs(self.L0), abs(expected)):
                raise DomainError(
                    "moving_convention_mismatch",
                    "the [0, vt] convention requires L0 = v*t0",
                    {"L0": self.L0, "v_t0": expected},
                )

    def _validate_wall_speed(self) -> None:
        if abs(self.v) < self.c:
            return
        if self.superluminal_study and self.v < -self.c:
            return
        raise DomainError(
            "wall_speed_out_of_range",
            "|v| >= c is only allowed for a superluminal study with v < -c",
            {"v": self.v, "c": self.c, "superluminal_study": self.superluminal_study},
        )

    @classmethod
    def moving_wall(
        cls,
        *,
        m: float,
        v: float,
        t0: float,
        hbar: float = 1.0,
        c: float = 1.0,
        V0: float | None = None,
    ) -> PhysicalParams:
        """Params for the [0, vt] convention with L0 derived from v·t0."""

        return cls(
            m=m, hbar=hbar, c=c, V0=V0, L0=v * t0, v=v, t0=t0, well_convention="moving"
        )

    @property
    def rest_energy(self) -> float:
        return self.m * self.c**2

    @property
    def compton_wavenumber(self) -> float:
        """mc/ħ, the factor multiplying y in the Bessel arguments."""

        return self.m * self.c / self.hbar

    def region_ii_bounds(self, t: float) -> tuple[float, float]:
        """The interval where V = 0 at time t, per the active convention."""

        if self.well_convention == "static":
            return (0.0, self.L0)
        if self.well_convention == "moving":
            return (0.0, self.v * t)
        return (0.0, self.L0 + self.v * (t - self.t0))

    def require_quantizable_speed(self) -> None:
        """k_n needs 0 < v < c."""

        if self.v == 0.0:
            raise DegenerateGeometryError(
                "static_wall", "v = 0 puts both walls at x = 1, so k_n divides by ln 1 = 0"
            )
        if self.superluminal_study or not 0.0 < self.v < self.c:
            raise DomainError(
                "wall_speed_out_of_range",
                "quantization needs 0 < v < c",
                {"v": self.v, "superluminal_study": self.superluminal_study},
            )

    def require_quantizable(self) -> None:
        """Moving-wall modes also need the [0, vt] convention."""

        self.require_quantizable_speed()
        if self.well_convention != "moving":
            raise DomainError(
                "convention_not_moving",
                "closed-form moving-wall modes exist only for the [0, vt] convention",
                {"well_convention": self.well_convention},
            )


@dataclass(frozen=True, slots=True)
class SpacetimePoint:
    z: float
    t: float


@dataclass(frozen=True, slots=True)
class SpinorSample:
    """The two nonzero components (φ₀, φ₂) of the up-spin z-propagating spinor."""

    phi0: complex
    phi2: complex

    def __post_init__(self) -> None:
        for name in ("phi0", "phi2"):
            value = complex(getattr(self, name))
            if not (math.isfinite(value.real) and math.isfinite(value.imag)):
                raise DomainError("non_finite_spinor", f"{name} is not finite")


def _scales_for(params: PhysicalParams) -> UnitScales:
    action = params.hbar
    speed = params.c
    if params.m > 0:
        mass = params.m
        length = params.hbar / (params.m * params.c)
    else:
        length = params.L0
        mass = params.hbar / (length * params.c)
    time = length / speed
    energy = mass * speed**2
    return UnitScales(mass=mass, length=length, time=time, energy=energy, action=action, speed=speed)


def natural_units(params: PhysicalParams) -> PhysicalParams:
    """Rescale to ħ = c = 1 with m ∈ {0, 1}; scale factors ride along on ``units``."""

    scales = _scales_for(params)
    return replace(
        params,
        m=params.m / scales.mass,
        hbar=params.hbar / scales.action,
        c=params.c / scales.speed,
        V0=None if params.V0 is None else params.V0 / scales.energy,
        L0=params.L0 / scales.length,
        v=params.v / scales.speed,
        t0=params.t0 / scales.time,
        units=params.units.compose(scales),
    )


def to_user_units(params: PhysicalParams) -> PhysicalParams:
    """Inverse of ``natural_units``: restore the units the caller started from."""

    scales = params.units
    return replace(
        params,
        m=params.m * scales.mass,
        hbar=params.hbar * scales.action,
        c=params.c * scales.speed,
        V0=None if params.V0 is None else params.V0 * scales.energy,
        L0=params.L0 * scales.length,
        v=params.v * scales.speed,
        t0=params.t0 * scales.time,
        units=UnitScales(),
    )


def energy_to_user(params: PhysicalParams, energy: float) -> float:
    return energy * params.units.energy


def energy_to_natural(params: PhysicalParams, energy: float) -> float:
    return energy / params.units.energy


def length_to_user(params: PhysicalParams, length: float) -> float:
    return length * params.units.length


def length_to_natural(params: PhysicalParams, length: float) -> float:
    return length / params.units.length


def time_to_user(params: PhysicalParams, time: float) -> float:
    return time * params.units.time


def time_to_natural(params: PhysicalParams, time: float) -> float:
    return time / params.units.time


def momentum_to_user(params: PhysicalParams, momentum: complex) -> complex:
    return momentum * params.units.action / params.units.length
