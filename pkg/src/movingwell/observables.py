"""Densities, currents, norms and the momentum expectation of spinor fields.

For the two-component layout (φ₀, φ₂) used throughout, ρ = |φ₀|² + |φ₂|² and
j = 2c·Re(φ₀* φ₂). Over an interval [a, b],

    ⟨p⟩ = ∫ ψ†(−iħ∂_z)ψ dz / ∫ ψ†ψ dz,

whose imaginary part is −(ħ/2)(ρ(b) − ρ(a)) / ∫ρ dz and is generally nonzero on
a sub-interval.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike
from scipy import integrate

from movingwell.core import (
    ComplexArray,
    ConvergenceError,
    DomainError,
    PairSampler,
    RealArray,
    SpinorSample,
)
from movingwell.logging_config import log_with_fields
from movingwell.oracle.finite_difference import (
    ResidualReport,
    StepPolicy,
    partial_derivatives,
    summarize,
)
from movingwell.oracle.grids import SpacetimeGrid
from movingwell.parallel import map_panels, split_panels

logger = logging.getLogger(__name__)

MIN_NORM = 1e-12
REFINEMENT_LEVELS = 3


def density(s: SpinorSample) -> float:
    return abs(s.phi0) ** 2 + abs(s.phi2) ** 2


def current(s: SpinorSample, *, c: float = 1.0) -> float:
    return 2.0 * c * (s.phi0.conjugate() * s.phi2).real


def density_field(phi0: ArrayLike, phi2: ArrayLike) -> RealArray:
    return np.abs(np.asarray(phi0)) ** 2 + np.abs(np.asarray(phi2)) ** 2


def current_field(phi0: ArrayLike, phi2: ArrayLike, *, c: float = 1.0) -> RealArray:
    return 2.0 * c * np.real(np.conj(np.asarray(phi0)) * np.asarray(phi2))


@dataclass(frozen=True, slots=True)
class IntervalGrid:
    z_lo: float
    z_hi: float
    n_points: int
    t: float

    def __post_init__(self) -> None:
        if not self.z_lo < self.z_hi:
            raise DomainError("bad_interval", "z_lo must be < z_hi", {"z_lo": self.z_lo, "z_hi": self.z_hi})
        if self.n_points < 16:
            raise DomainError("bad_interval", "at least 16 points are required", {"n_points": self.n_points})

    def points(self) -> RealArray:
        return np.linspace(self.z_lo, self.z_hi, self.n_points)

    def refined(self) -> IntervalGrid:
        """Halve the spacing: n → 2n − 1, keeping every existing node."""

        return IntervalGrid(z_lo=self.z_lo, z_hi=self.z_hi, n_points=2 * self.n_points - 1, t=self.t)

    @property
    def width(self) -> float:
        return self.z_hi - self.z_lo


def norm(sampler: PairSampler, grid: IntervalGrid) -> float:
    z = grid.points()
    phi0, phi2 = sampler(z, np.full_like(z, grid.t))
    return float(integrate.simpson(density_field(phi0, phi2), x=z))


@dataclass(frozen=True, slots=True)
class RefinementStep:
    n_points: int
    value: complex


@dataclass(frozen=True, slots=True)
class MomentumExpectation:
    value: complex
    history: tuple[RefinementStep, ...]

    @property
    def discrepancy(self) -> float:
        """Largest change of ⟨p⟩ across the refinement levels."""

        return max((abs(step.value - self.value) for step in self.history), default=0.0)


def _momentum_on(
    sampler: PairSampler, grid: IntervalGrid, *, hbar: float, policy: StepPolicy
) -> complex:
    z = grid.points()
    t = np.full_like(z, grid.t)
    d = partial_derivatives(sampler, z, t, arity=2, policy=policy)
    rho = density_field(d.value[0], d.value[1])
    integrand: ComplexArray = -1j * hbar * (np.conj(d.value[0]) * d.dz[0] + np.conj(d.value[1]) * d.dz[1])
    total = float(integrate.simpson(rho, x=z))
    if total <= MIN_NORM:
        raise DomainError(
            "vanishing_norm",
            "the field has no weight on the interval",
            {"norm": total, "z_lo": grid.z_lo, "z_hi": grid.z_hi},
        )
    numerator = integrate.simpson(integrand.real, x=z) + 1j * integrate.simpson(integrand.imag, x=z)
    return complex(numerator) / total


def momentum_expectation(
    sampler: PairSampler,
    grid: IntervalGrid,
    *,
    hbar: float = 1.0,
    policy: StepPolicy | None = None,
    tolerance: float = 1e-4,
) -> MomentumExpectation:
    """⟨p⟩ on ``grid`` and two refinements; raises if they disagree beyond ``tolerance``."""

    selected = policy if policy is not None else StepPolicy()
    history: list[RefinementStep] = []
    level = grid
    for _ in range(REFINEMENT_LEVELS):
        value = _momentum_on(sampler, level, hbar=hbar, policy=selected)
        history.append(RefinementStep(n_points=level.n_points, value=value))
        level = level.refined()

    result = MomentumExpectation(value=history[-1].value, history=tuple(history))
    scale = max(abs(result.value), hbar / grid.width)
    log_with_fields(
        logger,
        logging.INFO,
        "momentum expectation",
        re=result.value.real,
        im=result.value.imag,
        discrepancy=result.discrepancy,
        levels=len(history),
    )
    if result.discrepancy > tolerance * scale:
        raise ConvergenceError(
            "momentum_refinement",
            f"<p> changed by {result.discrepancy:.3g} across refinements (tolerance {tolerance:.3g})",
            {"history": [(step.n_points, step.value) for step in history]},
        )
    return result


def _continuity_panel(
    sampler: PairSampler, z: RealArray, t: RealArray, c: float, policy: StepPolicy
) -> tuple[RealArray, RealArray]:
    d = partial_derivatives(sampler, z, t, arity=2, policy=policy)
    phi0, phi2 = d.value[0], d.value[1]
    drho_dt = 2.0 * np.real(np.conj(phi0) * d.dt[0] + np.conj(phi2) * d.dt[1])
    dj_dz = 2.0 * c * np.real(np.conj(d.dz[0]) * phi2 + np.conj(phi0) * d.dz[1])
    scale = 2.0 * (
        np.abs(phi0) * np.abs(d.dt[0])
        + np.abs(phi2) * np.abs(d.dt[1])
        + c * (np.abs(d.dz[0]) * np.abs(phi2) + np.abs(phi0) * np.abs(d.dz[1]))
    )
    return np.abs(drho_dt + dj_dz), scale


def continuity_residual(
    sampler: PairSampler,
    grid: SpacetimeGrid,
    *,
    c: float = 1.0,
    policy: StepPolicy | None = None,
    threads: int = 1,
) -> ResidualReport:
    """|∂ₜρ + ∂_z j| relative to the largest bilinear term magnitude on the grid."""

    selected = policy if policy is not None else StepPolicy()
    panels = [grid.rows(index) for index in split_panels(grid.shape[0], threads)]
    pieces = map_panels(
        lambda panel: _continuity_panel(sampler, panel.z, panel.t, c, selected), panels, threads=threads
    )
    residual = np.concatenate([piece[0] for piece in pieces], axis=0)
    scale = float(np.concatenate([piece[1] for piece in pieces], axis=0).max(initial=0.0))
    relative = residual / scale if scale > 0 else np.zeros_like(residual)
    report = summarize(grid, relative)
    log_with_fields(
        logger, logging.DEBUG, "continuity residual", grid=grid.description, max_rel=report.max_rel_residual
    )
    return report
