"""Nonrelativistic finite square well: V = 0 on (0, L), V = V0 outside.

With ξ = kL/2, η = κL/2 and z0 = (L/2)√(2mV0)/ħ, even states satisfy
ξ sin ξ = η cos ξ and odd states ξ cos ξ = −η sin ξ, with ξ² + η² = z0².
Energies above the well bottom are ħ²(2ξ/L)²/(2m).
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable

from scipy import optimize

from movingwell.core import DomainError
from movingwell.logging_config import log_with_fields

logger = logging.getLogger(__name__)

_XTOL = 1e-15


def _even(z0: float) -> Callable[[float], float]:
    def condition(xi: float) -> float:
        return xi * math.sin(xi) - math.sqrt(max(z0 * z0 - xi * xi, 0.0)) * math.cos(xi)

    return condition


def _odd(z0: float) -> Callable[[float], float]:
    def condition(xi: float) -> float:
        return xi * math.cos(xi) + math.sqrt(max(z0 * z0 - xi * xi, 0.0)) * math.sin(xi)

    return condition


def well_strength(v0: float, length: float, mass: float, hbar: float = 1.0) -> float:
    return (length / 2.0) * math.sqrt(2.0 * mass * v0) / hbar


def schrodinger_well_oracle(v0: float, length: float, mass: float, *, hbar: float = 1.0) -> list[float]:
    """Bound energies measured from the well bottom, ascending."""

    if v0 <= 0 or length <= 0 or mass <= 0:
        raise DomainError(
            "bad_well",
            "the Schrödinger reference needs V0 > 0, L > 0 and m > 0",
            {"V0": v0, "L": length, "m": mass},
        )
    z0 = well_strength(v0, length, mass, hbar)
    roots: list[float] = []
    quarter = 0
    while quarter * math.pi / 2.0 < z0:
        lo = quarter * math.pi / 2.0
        hi = min(lo + math.pi / 2.0, z0)
        condition = _even(z0) if quarter % 2 == 0 else _odd(z0)
        f_lo, f_hi = condition(lo), condition(hi)
        if f_lo == 0.0 and lo > 0.0:
            roots.append(lo)
        elif f_lo * f_hi < 0.0:
            roots.append(float(optimize.bisect(condition, lo, hi, xtol=_XTOL)))
        quarter += 1

    energies = [(hbar * 2.0 * xi / length) ** 2 / (2.0 * mass) for xi in roots]
    log_with_fields(
        logger,
        logging.DEBUG,
        "schrodinger reference solved",
        z0=z0,
        states=len(energies),
    )
    return energies
