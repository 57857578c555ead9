"""Light-cone coordinates x = √((ct+z)/(ct−z)), y = √(c²t² − z²).

With u = ct + z and w = ct − z we have u = x·y and w = y/x, so the moving wall
z = vt sits on the fixed line x = √((c+v)/(c−v)) and the fixed wall z = 0 on
x = 1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from movingwell.core import DomainError, PhysicalParams, SpacetimePoint
from movingwell.logging_config import log_with_fields

logger = logging.getLogger(__name__)

type RealArray = NDArray[np.float64]

DEFAULT_NEAR_CONE_TOLERANCE = 1e-12


@dataclass(frozen=True, slots=True)
class LightConePoint:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)) or self.x <= 0 or self.y <= 0:
            raise DomainError(
                "outside_light_cone",
                "light-cone coordinates need x > 0 and y > 0",
                {"x": self.x, "y": self.y},
            )


def to_lightcone_arrays(
    z: ArrayLike,
    t: ArrayLike,
    *,
    c: float = 1.0,
    near_cone_tolerance: float = DEFAULT_NEAR_CONE_TOLERANCE,
) -> tuple[RealArray, RealArray]:
    """Vectorised forward map; rejects points within tolerance·ct of the cone."""

    z_arr = np.asarray(z, dtype=np.float64)
    ct = c * np.asarray(t, dtype=np.float64)
    u = ct + z_arr
    w = ct - z_arr
    margin = near_cone_tolerance * np.abs(ct)
    inside = (ct > 0) & (u > margin) & (w > margin)
    if not np.all(inside):
        bad = np.argwhere(~np.broadcast_to(inside, np.broadcast_shapes(z_arr.shape, ct.shape)))
        first = tuple(int(i) for i in bad[0]) if bad.size else ()
        raise DomainError(
            "outside_light_cone",
            "points must satisfy c*t > |z| with a relative margin",
            {"first_bad_index": first, "near_cone_tolerance": near_cone_tolerance},
        )
    return np.sqrt(u / w), np.sqrt(u * w)


def to_lightcone(
    p: SpacetimePoint,
    *,
    c: float = 1.0,
    near_cone_tolerance: float = DEFAULT_NEAR_CONE_TOLERANCE,
) -> LightConePoint:
    x, y = to_lightcone_arrays(p.z, p.t, c=c, near_cone_tolerance=near_cone_tolerance)
    return LightConePoint(x=float(x), y=float(y))


def from_lightcone_arrays(
    x: ArrayLike, y: ArrayLike, *, c: float = 1.0
) -> tuple[RealArray, RealArray]:
    x_arr = np.asarray(x, dtype=np.float64)
    y_arr = np.asarray(y, dtype=np.float64)
    if np.any(x_arr <= 0) or np.any(y_arr <= 0):
        raise DomainError("outside_light_cone", "light-cone coordinates need x > 0 and y > 0")
    z = y_arr * (x_arr - 1.0 / x_arr) / 2.0
    ct = y_arr * (x_arr + 1.0 / x_arr) / 2.0
    return z, ct / c


def from_lightcone(q: LightConePoint, *, c: float = 1.0) -> SpacetimePoint:
    z, t = from_lightcone_arrays(q.x, q.y, c=c)
    return SpacetimePoint(z=float(z), t=float(t))


def rapidity(v: float, c: float = 1.0) -> float:
    """η with v = c·tanh η; equals ln of the wall image."""

    if abs(v) >= c:
        raise DomainError("wall_speed_out_of_range", "rapidity needs |v| < c", {"v": v, "c": c})
    return math.atanh(v / c)


def wall_image(params: PhysicalParams) -> float:
    """x-coordinate of the moving wall z = vt; constant for all t > 0."""

    if abs(params.v) >= params.c:
        raise DomainError(
            "wall_speed_out_of_range",
            "the wall image is real only for |v| < c",
            {"v": params.v, "c": params.c},
        )
    if params.v == 0.0:
        log_with_fields(
            logger, logging.WARNING, "wall image degenerate", v=params.v, x_wall=1.0
        )
    return math.exp(rapidity(params.v, params.c))


@dataclass(frozen=True, slots=True)
class Jacobian:
    """Partial derivatives of (x, y) with respect to (z, t) at a point.

    ∂_t = c(∂_u + ∂_w), ∂_z = ∂_u − ∂_w with ∂_u = (x∂_x + y∂_y)/(2xy) and
    ∂_w = x(y∂_y − x∂_x)/(2y).
    """

    dx_dz: float
    dx_dt: float
    dy_dz: float
    dy_dt: float

    def chain(self, d_dx: complex, d_dy: complex) -> tuple[complex, complex]:
        """Convert (∂f/∂x, ∂f/∂y) into (∂f/∂z, ∂f/∂t)."""

        return (
            d_dx * self.dx_dz + d_dy * self.dy_dz,
            d_dx * self.dx_dt + d_dy * self.dy_dt,
        )


def jacobian(p: SpacetimePoint, *, c: float = 1.0) -> Jacobian:
    q = to_lightcone(p, c=c)
    ct = c * p.t
    # x² = u/w and y² = u·w
    u = ct + p.z
    w = ct - p.z
    dx_du = q.x / (2.0 * u)
    dx_dw = -q.x / (2.0 * w)
    dy_du = q.y / (2.0 * u)
    dy_dw = q.y / (2.0 * w)
    return Jacobian(
        dx_dz=dx_du - dx_dw,
        dx_dt=c * (dx_du + dx_dw),
        dy_dz=dy_du - dy_dw,
        dy_dt=c * (dy_du + dy_dw),
    )


def inside_well(
    z: ArrayLike, t: ArrayLike, *, v: float, padding: float = 1e-9
) -> NDArray[np.bool_]:
    """Mask of points with 0 ≤ z ≤ vt, padded by a relative tolerance."""

    z_arr = np.asarray(z, dtype=np.float64)
    wall = v * np.asarray(t, dtype=np.float64)
    slack = padding * np.maximum(np.abs(wall), 1e-300)
    return (z_arr >= -slack) & (z_arr <= wall + slack)
