from __future__ import annotations

import logging
import math

from movingwell.cli.config import RunConfig
from movingwell.cli.export import Cell, Table, complex_columns
from movingwell.core import (
    DomainError,
    PhysicalParams,
    RealArray,
    energy_to_natural,
    energy_to_user,
    length_to_user,
    momentum_to_user,
    natural_units,
    time_to_natural,
    time_to_user,
)
from movingwell.dirac_moving import integer_order_example, quantized_dirac_mode
from movingwell.kg_moving import kg_mode
from movingwell.lightcone import to_lightcone_arrays
from movingwell.logging_config import log_with_fields
from movingwell.observables import IntervalGrid, momentum_expectation
from movingwell.oracle.finite_difference import (
    MODE_RELATIVE_STEP,
    PDEKind,
    StepPolicy,
    residual_field,
    summarize,
)
from movingwell.oracle.grids import SpacetimeGrid
from movingwell.oracle.plane_waves import dirac_plane_wave
from movingwell.settings import Settings
from movingwell.static_well import bound_states, scattering_coefficients

logger = logging.getLogger(__name__)


def _natural_params(config: RunConfig) -> PhysicalParams:
    return natural_units(config.physics.to_params())


def cmd_bound_states(config: RunConfig, settings: Settings) -> Table:
    params = _natural_params(config)
    scan_points = config.bound_states.scan_points or settings.bound_scan_points
    solutions = bound_states(
        params,
        scan_points=scan_points,
        bisection_tolerance=settings.bound_bisection_tolerance,
        threads=config.threads,
    )
    rest = params.rest_energy
    rows: list[tuple[Cell, ...]] = [
        (
            index,
            energy_to_user(params, solution.E),
            energy_to_user(params, solution.E - rest),
            solution.plug_back_residual,
        )
        for index, solution in enumerate(solutions, start=1)
    ]
    return Table(
        command="bound-states",
        columns=("n", "E", "E_minus_rest", "plug_back_residual"),
        rows=rows,
        meta={"count": len(rows)},
    )


def cmd_scatter(config: RunConfig, settings: Settings) -> Table:
    params = _natural_params(config)
    rows: list[tuple[Cell, ...]] = []
    worst = 0.0
    for energy in config.scatter.energy_list():
        result = scattering_coefficients(energy_to_natural(params, energy), params)
        worst = max(worst, abs(result.total - 1.0))
        rows.append((energy, result.reflection, result.transmission, result.total, result.klein_zone))
    return Table(
        command="scatter",
        columns=("E", "R", "T", "R_plus_T", "klein_zone"),
        rows=rows,
        meta={"max_conservation_error": worst},
    )


def _mode_grid(config: RunConfig, params: PhysicalParams) -> SpacetimeGrid:
    params.require_quantizable()
    grid = config.grid
    return SpacetimeGrid.well_slab(
        v=params.v,
        t_lo=time_to_natural(params, grid.t_lo),
        t_hi=time_to_natural(params, grid.t_hi),
        nz=grid.nz,
        nt=grid.nt,
        margin=grid.margin,
    )


def _mode_policy(settings: Settings) -> StepPolicy:
    return StepPolicy(relative=MODE_RELATIVE_STEP, floor=settings.fd_floor)


def _grid_columns(
    params: PhysicalParams, grid: SpacetimeGrid, settings: Settings
) -> tuple[RealArray, RealArray, RealArray, RealArray]:
    x, y = to_lightcone_arrays(grid.z, grid.t, c=params.c, near_cone_tolerance=settings.near_cone_tolerance)
    unit_length = length_to_user(params, 1.0)
    unit_time = time_to_user(params, 1.0)
    return unit_length * grid.z.ravel(), unit_time * grid.t.ravel(), x.ravel(), unit_length * y.ravel()


def cmd_kg_modes(config: RunConfig, settings: Settings) -> Table:
    params = _natural_params(config)
    grid = _mode_grid(config, params)
    policy = _mode_policy(settings)
    z_user, t_user, x, y = _grid_columns(params, grid, settings)
    rows: list[tuple[Cell, ...]] = []
    meta: dict[str, Cell] = {"grid": grid.description}
    for n in config.modes.n:
        mode = kg_mode(n, params, cJ=config.modes.cJ_complex, cY=config.modes.cY_complex)
        sampler = mode.sampler(
            bessel_tolerance=settings.bessel_tolerance, near_cone_tolerance=settings.near_cone_tolerance
        )
        values = sampler(grid.z, grid.t).ravel()
        relative = residual_field(
            PDEKind.KLEIN_GORDON,
            sampler,
            grid,
            params=params,
            policy=policy,
            residual_floor=settings.residual_floor,
            threads=config.threads,
        )
        report = summarize(grid, relative)
        meta[f"max_residual_n{n}"] = report.max_rel_residual
        meta[f"k_n{n}"] = mode.k_n
        for index, value in enumerate(values):
            rows.append(
                (
                    n,
                    float(z_user[index]),
                    float(t_user[index]),
                    float(x[index]),
                    float(y[index]),
                    float(value.real),
                    float(value.imag),
                    float(relative.ravel()[index]),
                )
            )
        log_with_fields(logger, logging.INFO, "kg mode sampled", n=n, max_residual=report.max_rel_residual)
    return Table(
        command="kg-modes",
        columns=("n", "z", "t", "x", "y", *complex_columns("phi"), "residual"),
        rows=rows,
        meta=meta,
    )


def cmd_dirac_modes(config: RunConfig, settings: Settings) -> Table:
    params = _natural_params(config)
    grid = _mode_grid(config, params)
    policy = _mode_policy(settings)
    z_user, t_user, x, y = _grid_columns(params, grid, settings)
    rows: list[tuple[Cell, ...]] = []
    meta: dict[str, Cell] = {"grid": grid.description}
    for n in config.modes.n:
        mode = quantized_dirac_mode(n, params, cJ=config.modes.cJ_complex, cY=config.modes.cY_complex)
        sampler = mode.sampler(
            bessel_tolerance=settings.bessel_tolerance, near_cone_tolerance=settings.near_cone_tolerance
        )
        phi0, phi2 = sampler(grid.z, grid.t)
        relative = residual_field(
            PDEKind.DIRAC_SYSTEM,
            sampler,
            grid,
            params=params,
            policy=policy,
            residual_floor=settings.residual_floor,
            threads=config.threads,
        )
        report = summarize(grid, relative)
        meta[f"max_residual_n{n}"] = report.max_rel_residual
        flat0, flat2, flat_res = phi0.ravel(), phi2.ravel(), relative.ravel()
        for index in range(flat0.size):
            rows.append(
                (
                    n,
                    float(z_user[index]),
                    float(t_user[index]),
                    float(x[index]),
                    float(y[index]),
                    float(flat0[index].real),
                    float(flat0[index].imag),
                    float(flat2[index].real),
                    float(flat2[index].imag),
                    float(flat_res[index]),
                )
            )
        log_with_fields(logger, logging.INFO, "dirac mode sampled", n=n, max_residual=report.max_rel_residual)
    return Table(
        command="dirac-modes",
        columns=("n", "z", "t", "x", "y", *complex_columns("phi0"), *complex_columns("phi2"), "residual"),
        rows=rows,
        meta=meta,
    )


def cmd_momentum(config: RunConfig, settings: Settings) -> Table:
    params = _natural_params(config)
    options = config.momentum
    n_points = options.n_points or settings.quadrature_points
    policy = StepPolicy(relative=settings.fd_relative_step, floor=settings.fd_floor)
    if options.source == "integer-order":
        example = integer_order_example(params, options.nu, complex(*options.c1))
        ct0 = params.c * example.t0
        if not options.z_lo_fraction < options.z_hi_fraction:
            raise DomainError("bad_interval", "z_lo_fraction must be < z_hi_fraction")
        grid = IntervalGrid(
            z_lo=options.z_lo_fraction * ct0,
            z_hi=options.z_hi_fraction * ct0,
            n_points=n_points,
            t=example.t0,
        )
        sampler = example.sampler(near_cone_tolerance=settings.near_cone_tolerance)
    else:
        k_natural = options.plane_wave_k * length_to_user(params, 1.0)
        if k_natural == 0:
            raise DomainError("zero_wave_number", "the plane-wave control needs k != 0")
        log_with_fields(logger, logging.DEBUG, "plane wave control", k=k_natural)
        grid = IntervalGrid(z_lo=0.0, z_hi=2.0 * math.pi / abs(k_natural), n_points=n_points, t=0.0)
        sampler = dirac_plane_wave(k_natural, params)

    result = momentum_expectation(
        sampler,
        grid,
        hbar=params.hbar,
        policy=policy,
        tolerance=settings.momentum_refinement_tolerance,
    )
    rows: list[tuple[Cell, ...]] = []
    for level, step in enumerate(result.history, start=1):
        value = momentum_to_user(params, step.value)
        rows.append((level, step.n_points, value.real, value.imag))
    final = momentum_to_user(params, result.value)
    return Table(
        command="momentum",
        columns=("level", "n_points", "re_p", "im_p"),
        rows=rows,
        meta={
            "re_p": final.real,
            "im_p": final.imag,
            "discrepancy": abs(momentum_to_user(params, result.discrepancy)),
        },
    )
