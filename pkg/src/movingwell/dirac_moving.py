"""Dirac modes in the moving-wall well through U₁ = φ₀ + φ₂, U₂ = φ₀ − φ₂.

U₁ obeys the Klein-Gordon equation and U₂ = (2iħ/mc)∂_u U₁ with u = ct + z.
With s = mcy/ħ and collapsed coefficients d = (d₁, d₂, d₃, d₄):

    U₁ = x^ν [d₁J_ν(s) + d₂Y_ν(s)] + x^{−ν} [d₃J_ν(s) + d₄Y_ν(s)]
    U₂ = i x^{ν−1} [d₁J_{ν−1}(s) + d₂Y_{ν−1}(s)] − i x^{−ν−1} [d₃J_{ν+1}(s) + d₄Y_{ν+1}(s)]
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from movingwell.core import (
    ComplexArray,
    DomainError,
    PairSampler,
    PhysicalParams,
    RealArray,
    SpacetimePoint,
    SpinorSample,
)
from movingwell.kg_moving import WALL_PADDING, kn
from movingwell.lightcone import DEFAULT_NEAR_CONE_TOLERANCE, inside_well, to_lightcone_arrays
from movingwell.logging_config import log_with_fields
from movingwell.special_fn import DEFAULT_TOLERANCE, Order, as_order, bessel_combination

logger = logging.getLogger(__name__)

type Coefficients = tuple[complex, complex, complex, complex]


@dataclass(frozen=True, slots=True)
class DiracMovingMode:
    """``confined`` modes are evaluated only inside the well 0 ≤ z ≤ vt."""

    nu: Order
    d: Coefficients
    params: PhysicalParams
    confined: bool = False

    def __post_init__(self) -> None:
        if self.params.m <= 0:
            raise DomainError(
                "massless_dirac_mode",
                "U2 = (2i hbar / mc) d_u U1 needs m > 0",
                {"m": self.params.m},
            )
        if len(self.d) != 4:
            raise DomainError("bad_coefficients", "exactly four coefficients d1..d4 are required")

    def sampler(
        self,
        *,
        bessel_tolerance: float = DEFAULT_TOLERANCE,
        near_cone_tolerance: float = DEFAULT_NEAR_CONE_TOLERANCE,
    ) -> PairSampler:
        def sample(z: RealArray, t: RealArray) -> tuple[ComplexArray, ComplexArray]:
            return spinor_field(
                self, z, t, bessel_tolerance=bessel_tolerance, near_cone_tolerance=near_cone_tolerance
            )

        return sample

    def u_sampler(
        self,
        *,
        bessel_tolerance: float = DEFAULT_TOLERANCE,
        near_cone_tolerance: float = DEFAULT_NEAR_CONE_TOLERANCE,
    ) -> PairSampler:
        def sample(z: RealArray, t: RealArray) -> tuple[ComplexArray, ComplexArray]:
            return u_fields(
                self, z, t, bessel_tolerance=bessel_tolerance, near_cone_tolerance=near_cone_tolerance
            )

        return sample


def dirac_mode(
    nu: Order | complex | float,
    d: Sequence[complex],
    params: PhysicalParams,
) -> DiracMovingMode:
    coefficients = tuple(complex(value) for value in d)
    if len(coefficients) != 4:
        raise DomainError("bad_coefficients", "exactly four coefficients d1..d4 are required")
    c1, c2, c3, c4 = coefficients
    return DiracMovingMode(nu=as_order(nu), d=(c1, c2, c3, c4), params=params)


def _coordinates(
    mode: DiracMovingMode, z: ArrayLike, t: ArrayLike, near_cone_tolerance: float
) -> tuple[RealArray, RealArray]:
    params = mode.params
    z_arr, t_arr = np.broadcast_arrays(np.asarray(z, dtype=np.float64), np.asarray(t, dtype=np.float64))
    if mode.confined and not np.all(inside_well(z_arr, t_arr, v=params.v, padding=WALL_PADDING)):
        raise DomainError(
            "outside_well",
            "quantized modes are defined on 0 <= z <= v*t",
            {"v": params.v},
        )
    return to_lightcone_arrays(z_arr, t_arr, c=params.c, near_cone_tolerance=near_cone_tolerance)


def _power(x: RealArray, exponent: complex) -> ComplexArray:
    return np.exp(exponent * np.log(x))


def u_fields(
    mode: DiracMovingMode,
    z: ArrayLike,
    t: ArrayLike,
    *,
    bessel_tolerance: float = DEFAULT_TOLERANCE,
    near_cone_tolerance: float = DEFAULT_NEAR_CONE_TOLERANCE,
) -> tuple[ComplexArray, ComplexArray]:
    x, y = _coordinates(mode, z, t, near_cone_tolerance)
    nu = complex(mode.nu.nu)
    s = mode.params.compton_wavenumber * y
    d1, d2, d3, d4 = mode.d

    def radial(order: complex, c_j: complex, c_y: complex) -> ComplexArray:
        if c_j == 0 and c_y == 0:
            return np.zeros(s.shape, dtype=np.complex128)
        return bessel_combination(order, s, c_j, c_y, tolerance=bessel_tolerance)

    u1 = _power(x, nu) * radial(nu, d1, d2) + _power(x, -nu) * radial(nu, d3, d4)
    u2 = 1j * _power(x, nu - 1.0) * radial(nu - 1.0, d1, d2) - 1j * _power(x, -nu - 1.0) * radial(
        nu + 1.0, d3, d4
    )
    return u1, u2


def spinor_field(
    mode: DiracMovingMode,
    z: ArrayLike,
    t: ArrayLike,
    *,
    bessel_tolerance: float = DEFAULT_TOLERANCE,
    near_cone_tolerance: float = DEFAULT_NEAR_CONE_TOLERANCE,
) -> tuple[ComplexArray, ComplexArray]:
    """(φ₀, φ₂) = ((U₁ + U₂)/2, (U₁ − U₂)/2)."""

    u1, u2 = u_fields(
        mode, z, t, bessel_tolerance=bessel_tolerance, near_cone_tolerance=near_cone_tolerance
    )
    return (u1 + u2) / 2.0, (u1 - u2) / 2.0


def u1_value(mode: DiracMovingMode, p: SpacetimePoint) -> complex:
    u1, _ = u_fields(mode, p.z, p.t)
    return complex(np.ravel(u1)[0])


def u2_value(mode: DiracMovingMode, p: SpacetimePoint) -> complex:
    _, u2 = u_fields(mode, p.z, p.t)
    return complex(np.ravel(u2)[0])


def spinor_value(mode: DiracMovingMode, p: SpacetimePoint) -> SpinorSample:
    phi0, phi2 = spinor_field(mode, p.z, p.t)
    return SpinorSample(phi0=complex(np.ravel(phi0)[0]), phi2=complex(np.ravel(phi2)[0]))


def quantized_dirac_mode(
    n: int,
    params: PhysicalParams,
    *,
    cJ: complex = 1.0 + 0j,
    cY: complex = 0j,
) -> DiracMovingMode:
    """ν = ikₙ with x^{ν} and x^{−ν} paired so that U₁ = sin(kₙ ln x)·(cJ·J + cY·Y)."""

    params.require_quantizable()
    k_n = kn(n, params)
    half = 1.0 / 2j
    mode = DiracMovingMode(
        nu=Order(1j * k_n),
        d=(cJ * half, cY * half, -cJ * half, -cY * half),
        params=params,
        confined=True,
    )
    log_with_fields(logger, logging.DEBUG, "dirac mode built", n=n, k_n=k_n, v=params.v)
    return mode


def dirac_superposition(
    modes: Sequence[tuple[DiracMovingMode, complex]],
    *,
    bessel_tolerance: float = DEFAULT_TOLERANCE,
) -> PairSampler:
    terms = [(mode, complex(weight)) for mode, weight in modes]

    def sample(z: RealArray, t: RealArray) -> tuple[ComplexArray, ComplexArray]:
        shape = np.broadcast_shapes(np.shape(z), np.shape(t))
        upper = np.zeros(shape, dtype=np.complex128)
        lower = np.zeros(shape, dtype=np.complex128)
        for mode, weight in terms:
            if weight == 0:
                continue
            phi0, phi2 = spinor_field(mode, z, t, bessel_tolerance=bessel_tolerance)
            upper = upper + weight * phi0
            lower = lower + weight * phi2
        return upper, lower

    return sample


@dataclass(frozen=True, slots=True)
class IntegerOrderField:
    """Real integer-order example field; ``at`` evaluates on z at the fixed time t0."""

    mode: DiracMovingMode
    t0: float

    def at(self, z: ArrayLike) -> tuple[ComplexArray, ComplexArray]:
        z_arr = np.asarray(z, dtype=np.float64)
        ct0 = self.mode.params.c * self.t0
        if np.any(np.abs(z_arr) >= ct0):
            raise DomainError(
                "outside_light_cone",
                "the example field is defined on |z| < c*t0",
                {"t0": self.t0},
            )
        return spinor_field(self.mode, z_arr, np.full_like(z_arr, self.t0))

    def sampler(self, *, near_cone_tolerance: float = DEFAULT_NEAR_CONE_TOLERANCE) -> PairSampler:
        return self.mode.sampler(near_cone_tolerance=near_cone_tolerance)


def integer_order_example(
    params: PhysicalParams, nu_int: int, c1: complex = 1.0 + 0j
) -> IntegerOrderField:
    """φ₀ = (c₁/2)[x^ν J_ν(s) + i x^{ν−1} J_{ν−1}(s)], φ₂ = (c₁/2)[x^ν J_ν(s) − i x^{ν−1} J_{ν−1}(s)].

    No wall is constructed, so superluminal studies with v < −c are accepted.
    """

    if isinstance(nu_int, bool) or int(nu_int) != nu_int or nu_int < 1:
        raise DomainError("bad_order", "the example needs a positive integer order", {"nu": nu_int})
    if params.t0 <= 0:
        raise DomainError("bad_time", "the example is evaluated at t0 > 0", {"t0": params.t0})
    mode = DiracMovingMode(
        nu=Order(float(nu_int)),
        d=(complex(c1), 0j, 0j, 0j),
        params=params,
    )
    return IntegerOrderField(mode=mode, t0=params.t0)
