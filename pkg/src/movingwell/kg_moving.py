"""Klein-Gordon modes between a fixed wall at z = 0 and a wall moving as z = vt.

In light-cone coordinates the walls sit at x = 1 and x = x_wall, so separated
modes are sin(kₙ ln x)·g(y) with kₙ = nπ / ln x_wall. For m > 0 the radial
factor is cJ·J_{ikₙ}(mcy/ħ) + cY·Y_{ikₙ}(mcy/ħ); for m = 0 it is
cJ·y^{ikₙ} + cY·y^{−ikₙ}.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from movingwell.core import (
    ComplexArray,
    DomainError,
    PhysicalParams,
    RealArray,
    ScalarSampler,
    SpacetimePoint,
)
from movingwell.lightcone import (
    DEFAULT_NEAR_CONE_TOLERANCE,
    inside_well,
    rapidity,
    to_lightcone_arrays,
)
from movingwell.logging_config import log_with_fields
from movingwell.special_fn import DEFAULT_TOLERANCE, bessel_combination

logger = logging.getLogger(__name__)

WALL_PADDING = 1e-9


def kn(n: int, params: PhysicalParams) -> float:
    """kₙ = nπ / ln √((c+v)/(c−v)) = nπ / atanh(v/c)."""

    if n < 1:
        raise DomainError("bad_mode_index", "mode index n must be a positive integer", {"n": n})
    params.require_quantizable_speed()
    return n * math.pi / rapidity(params.v, params.c)


@dataclass(frozen=True, slots=True)
class KGMode:
    n: int
    k_n: float
    params: PhysicalParams
    cJ: complex = 1.0 + 0j
    cY: complex = 0j

    @property
    def order(self) -> complex:
        return 1j * self.k_n

    def sampler(
        self,
        *,
        bessel_tolerance: float = DEFAULT_TOLERANCE,
        near_cone_tolerance: float = DEFAULT_NEAR_CONE_TOLERANCE,
    ) -> ScalarSampler:
        def sample(z: RealArray, t: RealArray) -> ComplexArray:
            return kg_mode_field(
                self, z, t, bessel_tolerance=bessel_tolerance, near_cone_tolerance=near_cone_tolerance
            )

        return sample


def kg_mode(
    n: int, params: PhysicalParams, *, cJ: complex = 1.0 + 0j, cY: complex = 0j
) -> KGMode:
    params.require_quantizable()
    mode = KGMode(n=n, k_n=kn(n, params), params=params, cJ=complex(cJ), cY=complex(cY))
    log_with_fields(logger, logging.DEBUG, "kg mode built", n=n, k_n=mode.k_n, v=params.v, m=params.m)
    return mode


def _radial_factor(
    mode: KGMode, y: RealArray, *, bessel_tolerance: float
) -> ComplexArray:
    params = mode.params
    if params.m == 0:
        log_y = np.log(y)
        return mode.cJ * np.exp(1j * mode.k_n * log_y) + mode.cY * np.exp(-1j * mode.k_n * log_y)
    return bessel_combination(
        mode.order,
        params.compton_wavenumber * y,
        mode.cJ,
        mode.cY,
        tolerance=bessel_tolerance,
    )


def kg_mode_field(
    mode: KGMode,
    z: ArrayLike,
    t: ArrayLike,
    *,
    bessel_tolerance: float = DEFAULT_TOLERANCE,
    near_cone_tolerance: float = DEFAULT_NEAR_CONE_TOLERANCE,
) -> ComplexArray:
    params = mode.params
    z_arr, t_arr = np.broadcast_arrays(np.asarray(z, dtype=np.float64), np.asarray(t, dtype=np.float64))
    if not np.all(inside_well(z_arr, t_arr, v=params.v, padding=WALL_PADDING)):
        raise DomainError(
            "outside_well",
            "moving-wall modes are defined on 0 <= z <= v*t",
            {"v": params.v},
        )
    x, y = to_lightcone_arrays(z_arr, t_arr, c=params.c, near_cone_tolerance=near_cone_tolerance)
    angular = np.sin(mode.k_n * np.log(x))
    return angular * _radial_factor(mode, y, bessel_tolerance=bessel_tolerance)


def kg_mode_value(mode: KGMode, p: SpacetimePoint) -> complex:
    return complex(kg_mode_field(mode, p.z, p.t).ravel()[0])


def massless_dalembert_value(mode: KGMode, z: ArrayLike, t: ArrayLike) -> ComplexArray:
    """(u^{ik} − w^{ik}) / 2i with u = ct + z, w = ct − z; equals the J-only m = 0 mode."""

    c = mode.params.c
    u = c * np.asarray(t, dtype=np.float64) + np.asarray(z, dtype=np.float64)
    w = c * np.asarray(t, dtype=np.float64) - np.asarray(z, dtype=np.float64)
    return (np.exp(1j * mode.k_n * np.log(u)) - np.exp(1j * mode.k_n * np.log(w))) / 2j


def kg_superposition(
    modes: Sequence[tuple[KGMode, complex]],
    *,
    bessel_tolerance: float = DEFAULT_TOLERANCE,
) -> ScalarSampler:
    terms = [(mode, complex(weight)) for mode, weight in modes]

    def sample(z: RealArray, t: RealArray) -> ComplexArray:
        shape = np.broadcast_shapes(np.shape(z), np.shape(t))
        total = np.zeros(shape, dtype=np.complex128)
        for mode, weight in terms:
            if weight != 0:
                total = total + weight * kg_mode_field(mode, z, t, bessel_tolerance=bessel_tolerance)
        return total

    return sample
