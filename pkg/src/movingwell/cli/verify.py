"""Invariant suite behind ``movingwell verify``.

Each check is a plain function of a ``CheckContext`` returning a
``CheckResult``. Library errors raised inside a check count as a failure of
that check; the remaining checks still run.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from movingwell.cli.config import ConfigError, RunConfig
from movingwell.cli.export import Cell, Table
from movingwell.core import (
    ComplexArray,
    MovingWellError,
    PairSampler,
    PhysicalParams,
    RealArray,
)
from movingwell.dirac_moving import dirac_mode, integer_order_example, quantized_dirac_mode, u_fields
from movingwell.kg_moving import kg_mode, kg_mode_field, kn, massless_dalembert_value
from movingwell.lightcone import from_lightcone_arrays, to_lightcone_arrays, wall_image
from movingwell.logging_config import log_verification_event
from movingwell.observables import IntervalGrid, continuity_residual, momentum_expectation
from movingwell.oracle.finite_difference import (
    MODE_RELATIVE_STEP,
    PDEKind,
    StepPolicy,
    fd_residual,
    observed_order,
    partial_derivatives,
)
from movingwell.oracle.grids import SpacetimeGrid
from movingwell.oracle.plane_waves import dirac_plane_wave, kg_plane_wave
from movingwell.oracle.schrodinger import schrodinger_well_oracle
from movingwell.settings import Settings
from movingwell.special_fn import evaluate_bessel, evaluate_bessel_dx
from movingwell.static_well import bound_states, scattering_coefficients

logger = logging.getLogger(__name__)

VERIFY_GRID_POINTS = 16
WRONSKIAN_ORDERS: tuple[complex, ...] = (0.0, 0.5, 3.0, 0.5j, 5j, 20j, 2.0 + 1j)
WALL_SPEEDS = (0.3, 0.6, 0.9)
ORDER_TARGET = 4.0
ORDER_TOLERANCE = 0.3
_COARSE_RELATIVE_STEP = 0.05


@dataclass(frozen=True, slots=True)
class CheckContext:
    settings: Settings
    rng: np.random.Generator
    threads: int = 1
    inject_stencil_bug: bool = False

    @property
    def mode_policy(self) -> StepPolicy:
        return StepPolicy(relative=MODE_RELATIVE_STEP, floor=self.settings.fd_floor)

    @property
    def default_policy(self) -> StepPolicy:
        return StepPolicy(relative=self.settings.fd_relative_step, floor=self.settings.fd_floor)


@dataclass(frozen=True, slots=True)
class CheckResult:
    name: str
    passed: bool
    measured: float | None
    threshold: float | None
    detail: str = ""

    def row(self) -> tuple[Cell, ...]:
        measured: Cell = "" if self.measured is None or not math.isfinite(self.measured) else self.measured
        threshold: Cell = "" if self.threshold is None else self.threshold
        return (self.name, "pass" if self.passed else "fail", measured, threshold, self.detail)


type Check = Callable[[CheckContext], CheckResult]


def _at_most(name: str, measured: float, threshold: float, detail: str = "") -> CheckResult:
    return CheckResult(name=name, passed=measured <= threshold, measured=measured, threshold=threshold, detail=detail)


def _at_least(name: str, measured: float, threshold: float, detail: str = "") -> CheckResult:
    return CheckResult(name=name, passed=measured >= threshold, measured=measured, threshold=threshold, detail=detail)


def _moving(v: float) -> PhysicalParams:
    return PhysicalParams.moving_wall(m=1.0, v=v, t0=1.0)


def _slab(v: float) -> SpacetimeGrid:
    return SpacetimeGrid.well_slab(
        v=v, t_lo=1.0, t_hi=2.0, nz=VERIFY_GRID_POINTS, nt=VERIFY_GRID_POINTS, margin=0.05
    )


def check_bessel_wronskian(context: CheckContext) -> CheckResult:
    x = np.geomspace(0.1, 100.0, 40)
    tolerance = context.settings.bessel_tolerance
    worst = 0.0
    worst_order: complex = 0j
    for nu in WRONSKIAN_ORDERS:
        j = evaluate_bessel("J", nu, x, tolerance=tolerance).value
        y = evaluate_bessel("Y", nu, x, tolerance=tolerance).value
        jd = evaluate_bessel_dx("J", nu, x, tolerance=tolerance).value
        yd = evaluate_bessel_dx("Y", nu, x, tolerance=tolerance).value
        scale = np.maximum(1.0, np.maximum(np.abs(j * yd), np.abs(jd * y)))
        error = float(np.max(np.abs(j * yd - jd * y - 2.0 / (math.pi * x)) / scale))
        if error > worst:
            worst, worst_order = error, nu
    return _at_most("bessel_wronskian", worst, 1e-10, f"worst order {worst_order}")


def check_bessel_half_integer(context: CheckContext) -> CheckResult:
    x = np.geomspace(0.1, 100.0, 40)
    envelope = np.sqrt(2.0 / (math.pi * x))
    tolerance = context.settings.bessel_tolerance
    j = evaluate_bessel("J", 0.5, x, tolerance=tolerance).value
    y = evaluate_bessel("Y", 0.5, x, tolerance=tolerance).value
    error = max(
        float(np.max(np.abs(j - envelope * np.sin(x)) / envelope)),
        float(np.max(np.abs(y + envelope * np.cos(x)) / envelope)),
    )
    return _at_most("bessel_half_integer", error, 1e-10)


def check_lightcone_roundtrip(context: CheckContext) -> CheckResult:
    t = context.rng.uniform(0.5, 5.0, size=200)
    z = context.rng.uniform(-0.99, 0.99, size=200) * t
    x, y = to_lightcone_arrays(z, t)
    z_back, t_back = from_lightcone_arrays(x, y)
    roundtrip = float(np.max(np.maximum(np.abs(z_back - z), np.abs(t_back - t)) / t))
    params = _moving(0.6)
    x_wall, _ = to_lightcone_arrays(params.v * t, t)
    image = wall_image(params)
    wall = float(np.max(np.abs(x_wall - image)) / image)
    return _at_most("lightcone_roundtrip", max(roundtrip, wall), 1e-12, f"wall image error {wall:.3g}")


def check_quantization(context: CheckContext) -> CheckResult:
    params = PhysicalParams.moving_wall(m=1.0, v=math.tanh(math.pi), t0=1.0)
    first = kn(1, params)
    linear = max(abs(kn(n, params) - n * first) / (n * first) for n in range(1, 11))
    error = max(abs(first - 1.0), linear)
    return _at_most("quantization", error, 1e-12, f"k_1={first:.17g}")


def check_kg_modes(context: CheckContext) -> CheckResult:
    worst_residual = 0.0
    worst_wall = 0.0
    tolerance = context.settings.bessel_tolerance
    for v in WALL_SPEEDS:
        params = _moving(v)
        grid = _slab(v)
        t_axis = grid.t[:, 0]
        for n in (1, 4, 10):
            mode = kg_mode(n, params, cJ=1.0, cY=0.5)
            sampler = mode.sampler(bessel_tolerance=tolerance)
            report = fd_residual(
                PDEKind.KLEIN_GORDON,
                sampler,
                grid,
                params=params,
                policy=context.mode_policy,
                residual_floor=context.settings.residual_floor,
                threads=context.threads,
            )
            worst_residual = max(worst_residual, report.max_rel_residual)
            scale = float(np.max(np.abs(sampler(grid.z, grid.t))))
            walls = np.concatenate(
                [
                    np.abs(kg_mode_field(mode, np.zeros_like(t_axis), t_axis, bessel_tolerance=tolerance)),
                    np.abs(kg_mode_field(mode, v * t_axis, t_axis, bessel_tolerance=tolerance)),
                ]
            )
            worst_wall = max(worst_wall, float(walls.max()) / scale)
    passed = worst_residual <= 1e-6 and worst_wall <= 1e-9
    return CheckResult(
        name="kg_modes",
        passed=passed,
        measured=worst_residual,
        threshold=1e-6,
        detail=f"max wall value {worst_wall:.3g} (threshold 1e-9)",
    )


def check_kg_massless(context: CheckContext) -> CheckResult:
    params = PhysicalParams.moving_wall(m=0.0, v=0.5, t0=1.0)
    grid = _slab(0.5)
    worst = 0.0
    for n in (1, 3):
        mode = kg_mode(n, params)
        separated = kg_mode_field(mode, grid.z, grid.t)
        dalembert = massless_dalembert_value(mode, grid.z, grid.t)
        worst = max(worst, float(np.max(np.abs(separated - dalembert))))
    return _at_most("kg_massless", worst, 1e-12)


def check_dirac_modes(context: CheckContext) -> CheckResult:
    worst_residual = 0.0
    worst_wall = 0.0
    tolerance = context.settings.bessel_tolerance
    for v in (0.3, 0.6):
        params = _moving(v)
        grid = _slab(v)
        t_axis = grid.t[:, 0]
        for n in (1, 3):
            mode = quantized_dirac_mode(n, params, cJ=1.0, cY=0.25)
            report = fd_residual(
                PDEKind.DIRAC_SYSTEM,
                mode.sampler(bessel_tolerance=tolerance),
                grid,
                params=params,
                policy=context.mode_policy,
                residual_floor=context.settings.residual_floor,
                threads=context.threads,
            )
            worst_residual = max(worst_residual, report.max_rel_residual)
            u1, _ = u_fields(mode, grid.z, grid.t, bessel_tolerance=tolerance)
            scale = float(np.max(np.abs(u1)))
            at_fixed, _ = u_fields(mode, np.zeros_like(t_axis), t_axis, bessel_tolerance=tolerance)
            at_moving, _ = u_fields(mode, v * t_axis, t_axis, bessel_tolerance=tolerance)
            worst_wall = max(worst_wall, float(max(np.abs(at_fixed).max(), np.abs(at_moving).max())) / scale)
    passed = worst_residual <= 1e-6 and worst_wall <= 1e-9
    return CheckResult(
        name="dirac_modes",
        passed=passed,
        measured=worst_residual,
        threshold=1e-6,
        detail=f"max U1 wall value {worst_wall:.3g} (threshold 1e-9)",
    )


def _random_orders(rng: np.random.Generator) -> list[complex]:
    return [
        complex(rng.uniform(0.3, 3.0)),
        complex(rng.uniform(0.3, 3.0)),
        2.0 + 0j,
        1j * rng.uniform(0.5, 6.0),
        1j * rng.uniform(0.5, 6.0),
        complex(rng.uniform(0.3, 2.0), rng.uniform(0.3, 2.0)),
    ]


def check_dirac_u2_operator(context: CheckContext) -> CheckResult:
    """Closed-form U₂ against iħ(∂ₜ + c∂_z)U₁/(mc²) by finite differences."""

    params = PhysicalParams(m=1.0)
    rng = context.rng
    t = rng.uniform(1.0, 2.0, size=8)
    z = rng.uniform(-0.6, 0.6, size=8) * t
    worst = 0.0
    for nu in _random_orders(rng):
        d = rng.normal(size=4) + 1j * rng.normal(size=4)
        mode = dirac_mode(nu, [complex(value) for value in d], params)
        derivs = partial_derivatives(mode.u_sampler(), z, t, arity=2, policy=context.mode_policy)
        factor = 1j * params.hbar / params.rest_energy
        oracle = factor * (derivs.dt[0] + params.c * derivs.dz[0])
        closed = derivs.value[1]
        scale = max(
            float(np.max(np.abs(closed))),
            float(np.max(np.abs(factor) * (np.abs(derivs.dt[0]) + params.c * np.abs(derivs.dz[0])))),
        )
        worst = max(worst, float(np.max(np.abs(closed - oracle))) / scale)
    return _at_most("dirac_u2_operator", worst, 1e-7, "6 random modes")


def _random_scattering_case(rng: np.random.Generator) -> tuple[float, PhysicalParams]:
    margin = 0.05
    v0 = rng.uniform(0.5, 6.0)
    length = rng.uniform(0.2, 5.0)
    params = PhysicalParams(m=1.0, V0=v0, L0=length)
    if v0 > 2.0 + 2.0 * margin and rng.random() < 0.5:
        energy = rng.uniform(1.0 + margin, v0 - 1.0 - margin)
    else:
        energy = rng.uniform(v0 + 1.0 + margin, v0 + 6.0)
    return float(energy), params


def check_static_plug_back(context: CheckContext) -> CheckResult:
    worst = 0.0
    for _ in range(100):
        energy, params = _random_scattering_case(context.rng)
        worst = max(worst, scattering_coefficients(energy, params).solution.plug_back_residual)
    return _at_most("static_plug_back", worst, 1e-10, "100 random (E, V0, L0)")


def check_static_conservation(context: CheckContext) -> CheckResult:
    params = PhysicalParams(m=1.0, V0=5.0, L0=1.5)
    energies = np.concatenate([np.linspace(1.05, 3.95, 30), np.linspace(6.05, 10.0, 30)])
    results = [scattering_coefficients(float(energy), params) for energy in energies]
    worst = max(abs(result.total - 1.0) for result in results)
    klein = sum(result.klein_zone for result in results)
    free = PhysicalParams(m=1.0, V0=0.0, L0=1.5)
    free_error = max(
        abs(scattering_coefficients(float(energy), free).transmission - 1.0)
        for energy in np.linspace(1.05, 5.0, 10)
    )
    return _at_most(
        "static_conservation",
        max(worst, free_error),
        1e-10,
        f"{klein} Klein-zone energies; V0=0 transmission error {free_error:.3g}",
    )


def check_static_bound_states(context: CheckContext) -> CheckResult:
    params = PhysicalParams(m=1.0, V0=1.5, L0=3.0)
    solutions = bound_states(
        params,
        scan_points=context.settings.bound_scan_points,
        bisection_tolerance=context.settings.bound_bisection_tolerance,
        threads=context.threads,
    )
    if not solutions:
        return CheckResult("static_bound_states", False, None, 1e-10, "no bound states found")
    worst = max(solution.plug_back_residual for solution in solutions)
    return _at_most("static_bound_states", worst, 1e-10, f"{len(solutions)} states")


def check_nonrelativistic_limit(context: CheckContext) -> CheckResult:
    v0, length = 1e-3, 200.0
    params = PhysicalParams(m=1.0, V0=v0, L0=length)
    solutions = bound_states(
        params,
        scan_points=context.settings.bound_scan_points,
        bisection_tolerance=context.settings.bound_bisection_tolerance,
        threads=context.threads,
    )
    reference = schrodinger_well_oracle(v0, length, 1.0)
    if len(solutions) != len(reference) or not reference:
        return CheckResult(
            "nonrelativistic_limit",
            False,
            None,
            1e-2,
            f"state count {len(solutions)} vs reference {len(reference)}",
        )
    worst = max(
        abs((solution.E - params.rest_energy) - expected) / expected
        for solution, expected in zip(solutions, reference, strict=True)
    )
    return _at_most("nonrelativistic_limit", worst, 1e-2, f"{len(reference)} states")


def _corrupted(sampler: PairSampler) -> PairSampler:
    def sample(z: RealArray, t: RealArray) -> tuple[ComplexArray, ComplexArray]:
        phi0, phi2 = sampler(z, t)
        return phi0, 2.0 * phi2

    return sample


def _continuity_cases(context: CheckContext) -> tuple[SpacetimeGrid, PairSampler, PairSampler]:
    params = _moving(0.6)
    mode = quantized_dirac_mode(1, params)
    return _slab(0.6), mode.sampler(bessel_tolerance=context.settings.bessel_tolerance), dirac_plane_wave(
        1.5, params
    )


def check_continuity(context: CheckContext) -> CheckResult:
    grid, mode_sampler, plane_sampler = _continuity_cases(context)
    worst = max(
        continuity_residual(mode_sampler, grid, policy=context.mode_policy, threads=context.threads).max_rel_residual,
        continuity_residual(plane_sampler, grid, policy=context.mode_policy, threads=context.threads).max_rel_residual,
    )
    return _at_most("continuity", worst, 1e-6)


def check_continuity_negative_control(context: CheckContext) -> CheckResult:
    grid, mode_sampler, _ = _continuity_cases(context)
    report = continuity_residual(_corrupted(mode_sampler), grid, policy=context.mode_policy, threads=context.threads)
    return _at_least("continuity_negative_control", report.max_rel_residual, 1e-3, "lower component doubled")


def check_complex_momentum(context: CheckContext) -> CheckResult:
    params = PhysicalParams(m=1.0, t0=1.0)
    example = integer_order_example(params, 1)
    grid = IntervalGrid(z_lo=0.05, z_hi=0.95, n_points=context.settings.quadrature_points, t=1.0)
    result = momentum_expectation(
        example.sampler(),
        grid,
        hbar=params.hbar,
        policy=context.default_policy,
        tolerance=context.settings.momentum_refinement_tolerance,
    )
    ratio = abs(result.value.imag) / max(result.discrepancy, np.finfo(np.float64).tiny)
    return _at_least(
        "complex_momentum",
        ratio,
        100.0,
        f"Im<p>={result.value.imag:.6g} discrepancy={result.discrepancy:.3g}",
    )


def check_plane_wave_momentum(context: CheckContext) -> CheckResult:
    params = PhysicalParams(m=1.0)
    k = 1.0
    grid = IntervalGrid(z_lo=0.0, z_hi=2.0 * math.pi / k, n_points=context.settings.quadrature_points, t=0.0)
    result = momentum_expectation(dirac_plane_wave(k, params), grid, policy=context.default_policy)
    return _at_most("plane_wave_momentum", abs(result.value.imag), 1e-8, f"Re<p>={result.value.real:.6g}")


def check_oracle_plane_waves(context: CheckContext) -> CheckResult:
    params = PhysicalParams(m=1.0)
    grid = SpacetimeGrid.rectangle(z_lo=0.0, z_hi=1.0, t_lo=1.0, t_hi=2.0, nz=12, nt=12)
    kg = fd_residual(PDEKind.KLEIN_GORDON, kg_plane_wave(1.0, params), grid, params=params, policy=context.default_policy)
    dirac = fd_residual(
        PDEKind.DIRAC_SYSTEM, dirac_plane_wave(1.0, params), grid, params=params, policy=context.default_policy
    )
    return _at_most("oracle_plane_waves", max(kg.max_rel_residual, dirac.max_rel_residual), 1e-8)


def check_stencil_order(context: CheckContext) -> CheckResult:
    params = PhysicalParams(m=1.0)
    grid = SpacetimeGrid.rectangle(z_lo=0.0, z_hi=1.0, t_lo=1.0, t_hi=2.0, nz=8, nt=8)
    coarse = StepPolicy(
        relative=_COARSE_RELATIVE_STEP,
        floor=context.settings.fd_floor,
        order=2 if context.inject_stencil_bug else 4,
    )
    orders = [
        observed_order(PDEKind.KLEIN_GORDON, kg_plane_wave(1.0, params), grid, params=params, coarse=coarse),
        observed_order(PDEKind.DIRAC_SYSTEM, dirac_plane_wave(1.0, params), grid, params=params, coarse=coarse),
    ]
    deviation = max(abs(order - ORDER_TARGET) for order in orders)
    return _at_most(
        "stencil_order",
        deviation,
        ORDER_TOLERANCE,
        "observed orders " + ", ".join(f"{order:.3f}" for order in orders),
    )


CHECKS: dict[str, Check] = {
    "bessel_wronskian": check_bessel_wronskian,
    "bessel_half_integer": check_bessel_half_integer,
    "lightcone_roundtrip": check_lightcone_roundtrip,
    "quantization": check_quantization,
    "kg_modes": check_kg_modes,
    "kg_massless": check_kg_massless,
    "dirac_modes": check_dirac_modes,
    "dirac_u2_operator": check_dirac_u2_operator,
    "static_plug_back": check_static_plug_back,
    "static_conservation": check_static_conservation,
    "static_bound_states": check_static_bound_states,
    "nonrelativistic_limit": check_nonrelativistic_limit,
    "continuity": check_continuity,
    "continuity_negative_control": check_continuity_negative_control,
    "complex_momentum": check_complex_momentum,
    "plane_wave_momentum": check_plane_wave_momentum,
    "oracle_plane_waves": check_oracle_plane_waves,
    "stencil_order": check_stencil_order,
}


def _selected(config: RunConfig) -> list[str]:
    names = list(CHECKS) if config.verify.checks is None else list(config.verify.checks)
    unknown = sorted(set(names) - set(CHECKS))
    if unknown:
        raise ConfigError(
            "unknown_check",
            "unknown verification checks: " + ", ".join(unknown),
            {"known": sorted(CHECKS)},
        )
    return names


def run_checks(config: RunConfig, settings: Settings) -> list[CheckResult]:
    positions = {name: index for index, name in enumerate(CHECKS)}
    results: list[CheckResult] = []
    for name in _selected(config):
        context = CheckContext(
            settings=settings,
            rng=np.random.default_rng([config.seed, positions[name]]),
            threads=config.threads,
            inject_stencil_bug=config.verify.inject_stencil_bug,
        )
        try:
            result = CHECKS[name](context)
        except MovingWellError as exc:
            result = CheckResult(
                name=name,
                passed=False,
                measured=None,
                threshold=None,
                detail=f"{type(exc).__name__}: {exc.reason_code}",
            )
        log_verification_event(
            check=name,
            outcome="pass" if result.passed else "fail",
            measured=result.measured,
            threshold=result.threshold,
        )
        results.append(result)
    return results


def cmd_verify(config: RunConfig, settings: Settings) -> Table:
    results = run_checks(config, settings)
    failed = sum(not result.passed for result in results)
    return Table(
        command="verify",
        columns=("check", "outcome", "measured", "threshold", "detail"),
        rows=[result.row() for result in results],
        meta={"passed": len(results) - failed, "failed": failed},
    )
