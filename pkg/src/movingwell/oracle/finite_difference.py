"""Finite-difference residuals of the wave equations solved by the package.

Operators (V is an optional potential V(z)):

* Klein-Gordon: ħ²∂ₜ²φ − ħ²c²∂_z²φ + m²c⁴φ
* Dirac system on (φ₀, φ₂):
  iħ∂ₜφ₀ + iħc∂_zφ₂ − (mc² + V)φ₀ and iħ∂ₜφ₂ + iħc∂_zφ₀ + (mc² − V)φ₂
* U system on (U₁, U₂) = (φ₀ + φ₂, φ₀ − φ₂):
  iħ(∂ₜ + c∂_z)U₁ − mc²U₂ − VU₁ and iħ(∂ₜ − c∂_z)U₂ − mc²U₁ − VU₂
* Klein-Gordon applied to U₁ = φ₀ + φ₂ of a Dirac pair.

Residuals are reported relative to the sum of the magnitudes of the operator's
terms at each point, floored to avoid 0/0 on nodes.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import StrEnum
from typing import cast

import numpy as np

from movingwell.core import (
    ComplexArray,
    DomainError,
    PairSampler,
    PhysicalParams,
    Potential,
    RealArray,
    ScalarSampler,
)
from movingwell.logging_config import log_with_fields
from movingwell.oracle.grids import SpacetimeGrid
from movingwell.parallel import map_panels, split_panels

logger = logging.getLogger(__name__)

DEFAULT_RELATIVE_STEP = 3e-3
# ε^(1/5) balances 4th-order truncation against rounding for first derivatives.
MODE_RELATIVE_STEP = float(np.finfo(np.float64).eps) ** 0.2
MAX_WORST_POINTS = 10


class PDEKind(StrEnum):
    KLEIN_GORDON = "klein-gordon"
    DIRAC_SYSTEM = "dirac-system"
    U_SYSTEM = "u-system"
    KG_ON_U1 = "kg-on-u1"

    @property
    def arity(self) -> int:
        return 1 if self is PDEKind.KLEIN_GORDON else 2


@dataclass(frozen=True, slots=True)
class StepPolicy:
    """h = relative · max(|coordinate|, floor); ``order`` selects the stencil."""

    relative: float = DEFAULT_RELATIVE_STEP
    floor: float = 1.0
    order: int = 4

    def __post_init__(self) -> None:
        if self.order not in (2, 4):
            raise DomainError("bad_stencil_order", "stencil order must be 2 or 4", {"order": self.order})
        if not (self.relative > 0 and self.floor > 0):
            raise DomainError("bad_step_policy", "relative step and floor must be > 0")

    def steps(self, coord: RealArray) -> RealArray:
        return self.relative * np.maximum(np.abs(coord), self.floor)

    def scaled(self, factor: float) -> StepPolicy:
        return StepPolicy(relative=self.relative * factor, floor=self.floor, order=self.order)


@dataclass(frozen=True, slots=True)
class Derivatives:
    """Stacked component values and partials, each of shape (components, *grid)."""

    value: ComplexArray
    dz: ComplexArray
    dt: ComplexArray
    dzz: ComplexArray
    dtt: ComplexArray


def _as_stack(sampler: ScalarSampler | PairSampler, arity: int) -> Callable[[RealArray, RealArray], ComplexArray]:
    def evaluate(z: RealArray, t: RealArray) -> ComplexArray:
        raw = sampler(z, t)
        if arity == 1:
            return np.asarray(raw, dtype=np.complex128)[np.newaxis]
        first, second = cast(tuple[ComplexArray, ComplexArray], raw)
        return np.stack([np.asarray(first, dtype=np.complex128), np.asarray(second, dtype=np.complex128)])

    return evaluate


def _first(fm2: ComplexArray, fm1: ComplexArray, fp1: ComplexArray, fp2: ComplexArray, h: RealArray, order: int) -> ComplexArray:
    if order == 2:
        return (fp1 - fm1) / (2.0 * h)
    return (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h)


def _second(
    fm2: ComplexArray, fm1: ComplexArray, f0: ComplexArray, fp1: ComplexArray, fp2: ComplexArray, h: RealArray, order: int
) -> ComplexArray:
    if order == 2:
        return (fp1 - 2.0 * f0 + fm1) / (h * h)
    return (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h)


def partial_derivatives(
    sampler: ScalarSampler | PairSampler,
    z: RealArray,
    t: RealArray,
    *,
    arity: int = 1,
    policy: StepPolicy | None = None,
) -> Derivatives:
    selected = policy if policy is not None else StepPolicy()
    evaluate = _as_stack(sampler, arity)
    hz = selected.steps(z)
    ht = selected.steps(t)
    f0 = evaluate(z, t)
    z_shift = [evaluate(z + k * hz, t) for k in (-2, -1, 1, 2)]
    t_shift = [evaluate(z, t + k * ht) for k in (-2, -1, 1, 2)]
    order = selected.order
    return Derivatives(
        value=f0,
        dz=_first(*z_shift, hz, order),
        dt=_first(*t_shift, ht, order),
        dzz=_second(z_shift[0], z_shift[1], f0, z_shift[2], z_shift[3], hz, order),
        dtt=_second(t_shift[0], t_shift[1], f0, t_shift[2], t_shift[3], ht, order),
    )


@dataclass(frozen=True, slots=True)
class WorstPoint:
    z: float
    t: float
    relative_residual: float


@dataclass(frozen=True, slots=True)
class ResidualReport:
    grid_description: str
    n_points: int
    max_rel_residual: float
    mean_rel_residual: float
    worst: tuple[WorstPoint, ...] = field(default_factory=tuple)

    def passes(self, tolerance: float) -> bool:
        return self.max_rel_residual <= tolerance


def _klein_gordon_terms(
    value: ComplexArray, dzz: ComplexArray, dtt: ComplexArray, params: PhysicalParams
) -> list[ComplexArray]:
    return [
        params.hbar**2 * dtt,
        -(params.hbar**2) * params.c**2 * dzz,
        params.m**2 * params.c**4 * value,
    ]


def _relative(terms: list[ComplexArray], floor: float) -> RealArray:
    total = np.abs(sum(terms[1:], terms[0]))
    scale = np.sum([np.abs(term) for term in terms], axis=0)
    return np.asarray(total / np.maximum(scale, floor), dtype=np.float64)


def _panel_residual(
    kind: PDEKind,
    sampler: ScalarSampler | PairSampler,
    z: RealArray,
    t: RealArray,
    params: PhysicalParams,
    potential: Potential | None,
    policy: StepPolicy,
    floor: float,
) -> RealArray:
    d = partial_derivatives(sampler, z, t, arity=kind.arity, policy=policy)
    hbar, c, rest = params.hbar, params.c, params.rest_energy
    v_z = np.zeros_like(z) if potential is None else np.asarray(potential(z), dtype=np.float64)

    if kind is PDEKind.KLEIN_GORDON:
        return _relative(_klein_gordon_terms(d.value[0], d.dzz[0], d.dtt[0], params), floor)
    if kind is PDEKind.KG_ON_U1:
        return _relative(
            _klein_gordon_terms(d.value[0] + d.value[1], d.dzz[0] + d.dzz[1], d.dtt[0] + d.dtt[1], params),
            floor,
        )
    if kind is PDEKind.DIRAC_SYSTEM:
        upper = [1j * hbar * d.dt[0], 1j * hbar * c * d.dz[1], -(rest + v_z) * d.value[0]]
        lower = [1j * hbar * d.dt[1], 1j * hbar * c * d.dz[0], (rest - v_z) * d.value[1]]
    else:
        upper = [1j * hbar * d.dt[0], 1j * hbar * c * d.dz[0], -rest * d.value[1], -v_z * d.value[0]]
        lower = [1j * hbar * d.dt[1], -1j * hbar * c * d.dz[1], -rest * d.value[0], -v_z * d.value[1]]
    return np.maximum(_relative(upper, floor), _relative(lower, floor))


def summarize(grid: SpacetimeGrid, relative: RealArray) -> ResidualReport:
    """Collapse a per-point relative residual array into a report."""

    if not np.all(np.isfinite(relative)):
        raise DomainError(
            "non_finite_residual",
            "the sampler produced non-finite values on the stencil",
            {"grid": grid.description},
        )
    flat = relative.ravel()
    order = np.argsort(flat, kind="stable")[::-1][:MAX_WORST_POINTS]
    worst = tuple(
        WorstPoint(
            z=float(grid.z.ravel()[i]),
            t=float(grid.t.ravel()[i]),
            relative_residual=float(flat[i]),
        )
        for i in order
    )
    return ResidualReport(
        grid_description=grid.description,
        n_points=grid.size,
        max_rel_residual=float(flat.max(initial=0.0)),
        mean_rel_residual=float(flat.mean()) if flat.size else 0.0,
        worst=worst,
    )


def residual_field(
    kind: PDEKind,
    sampler: ScalarSampler | PairSampler,
    grid: SpacetimeGrid,
    *,
    params: PhysicalParams,
    potential: Potential | None = None,
    policy: StepPolicy | None = None,
    residual_floor: float = 1e-30,
    threads: int = 1,
) -> RealArray:
    """Relative residual at every grid point, shape (nt, nz)."""

    selected = policy if policy is not None else StepPolicy()
    panels = [grid.rows(index) for index in split_panels(grid.shape[0], threads)]
    pieces = map_panels(
        lambda panel: _panel_residual(
            kind, sampler, panel.z, panel.t, params, potential, selected, residual_floor
        ),
        panels,
        threads=threads,
    )
    return np.concatenate(pieces, axis=0)


def fd_residual(
    kind: PDEKind,
    sampler: ScalarSampler | PairSampler,
    grid: SpacetimeGrid,
    *,
    params: PhysicalParams,
    potential: Potential | None = None,
    policy: StepPolicy | None = None,
    residual_floor: float = 1e-30,
    threads: int = 1,
) -> ResidualReport:
    selected = policy if policy is not None else StepPolicy()
    relative = residual_field(
        kind,
        sampler,
        grid,
        params=params,
        potential=potential,
        policy=selected,
        residual_floor=residual_floor,
        threads=threads,
    )
    report = summarize(grid, relative)
    log_with_fields(
        logger,
        logging.DEBUG,
        "fd residual",
        kind=kind.value,
        grid=grid.description,
        max_rel=report.max_rel_residual,
        mean_rel=report.mean_rel_residual,
        stencil_order=selected.order,
    )
    return report


def observed_order(
    kind: PDEKind,
    sampler: ScalarSampler | PairSampler,
    grid: SpacetimeGrid,
    *,
    params: PhysicalParams,
    coarse: StepPolicy,
    potential: Potential | None = None,
) -> float:
    """log₂ of the residual ratio between steps h and h/2 for an exact solution."""

    fine = coarse.scaled(0.5)
    coarse_max = fd_residual(kind, sampler, grid, params=params, potential=potential, policy=coarse)
    fine_max = fd_residual(kind, sampler, grid, params=params, potential=potential, policy=fine)
    if fine_max.max_rel_residual <= 0.0 or coarse_max.max_rel_residual <= 0.0:
        raise DomainError(
            "order_undefined",
            "residuals vanished; the observed order needs a nonzero truncation error",
        )
    return math.log2(coarse_max.max_rel_residual / fine_max.max_rel_residual)
