from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate

from movingwell.core import DomainError, PhysicalParams
from movingwell.oracle.finite_difference import PDEKind, fd_residual
from movingwell.oracle.grids import SpacetimeGrid
from movingwell.oracle.schrodinger import schrodinger_well_oracle
from movingwell.static_well import (
    PLUG_BACK_TOLERANCE,
    Region,
    assemble_spinor,
    bound_state_determinant,
    bound_states,
    bound_window,
    match_at_L,
    match_at_zero,
    normalize_bound_state,
    plug_back_residual,
    scattering_coefficients,
    spinor_plane_wave,
    spinor_ratio,
    wave_numbers,
    well_potential,
)


def test_wave_numbers_take_the_principal_branch(finite_well: PhysicalParams) -> None:
    numbers = wave_numbers(2.0, finite_well)

    assert numbers.k1 == pytest.approx(math.sqrt(3.0))
    assert numbers.k2.real == pytest.approx(0.0, abs=1e-15)
    assert numbers.k2.imag == pytest.approx(math.sqrt(0.75))


def test_spinor_ratio_pole_is_rejected(free_params: PhysicalParams) -> None:
    with pytest.raises(DomainError, match="spinor_pole"):
        spinor_ratio(1.0, -1.0, 0.0, free_params)


def test_plane_wave_direction_must_be_a_sign(finite_well: PhysicalParams) -> None:
    with pytest.raises(DomainError, match="bad_direction"):
        spinor_plane_wave(1.0, 2.0, 0, "II", finite_well)


def test_infinite_walls_are_not_a_finite_well(free_params: PhysicalParams) -> None:
    with pytest.raises(DomainError, match="infinite_walls"):
        wave_numbers(2.0, free_params)


def test_bound_window_edges() -> None:
    assert bound_window(PhysicalParams(m=1.0, V0=1.5, L0=3.0)) == (1.0, 2.5)
    assert bound_window(PhysicalParams(m=1.0, V0=5.0, L0=3.0)) == (4.0, 6.0)
    assert bound_window(PhysicalParams(m=1.0, V0=0.0, L0=3.0)) is None
    assert bound_window(PhysicalParams(m=0.0, V0=1.5, L0=3.0)) is None


def test_empty_window_yields_no_states() -> None:
    assert bound_states(PhysicalParams(m=1.0, V0=0.0, L0=3.0)) == []


def test_determinant_is_only_defined_in_the_window(finite_well: PhysicalParams) -> None:
    with pytest.raises(DomainError, match="outside_bound_window"):
        bound_state_determinant(3.0, finite_well)
    with pytest.raises(DomainError, match="outside_bound_window"):
        bound_state_determinant(1.0, PhysicalParams(m=1.0, V0=0.0, L0=1.0))


def test_bound_states_are_sorted_roots_with_small_plug_back(finite_well: PhysicalParams) -> None:
    solutions = bound_states(finite_well)
    energies = [solution.E for solution in solutions]

    assert solutions
    assert energies == sorted(energies)
    assert all(1.0 < energy < 2.5 for energy in energies)
    for solution in solutions:
        assert solution.kind == "bound"
        assert solution.plug_back_residual <= PLUG_BACK_TOLERANCE
        assert solution.coeffs.s == 0 and solution.coeffs.r == 0


def test_bound_states_do_not_depend_on_thread_count(finite_well: PhysicalParams) -> None:
    serial = [solution.E for solution in bound_states(finite_well, threads=1)]
    threaded = [solution.E for solution in bound_states(finite_well, threads=4)]

    assert threaded == pytest.approx(serial, rel=1e-12)


def test_normalized_bound_state_integrates_to_one(finite_well: PhysicalParams) -> None:
    solution = normalize_bound_state(bound_states(finite_well)[0], finite_well)
    field = assemble_spinor(solution, finite_well)

    total = 0.0
    for lo, hi in ((-40.0, 0.0), (0.0, 3.0), (3.0, 43.0)):
        z = np.linspace(lo, hi, 8001)
        phi0, phi2 = field(z, np.zeros_like(z))
        total += float(integrate.simpson(np.abs(phi0) ** 2 + np.abs(phi2) ** 2, x=z))

    assert total == pytest.approx(1.0, abs=1e-8)


def test_only_bound_solutions_normalize() -> None:
    params = PhysicalParams(m=1.0, V0=5.0, L0=1.5)
    scattering = scattering_coefficients(7.0, params).solution

    with pytest.raises(DomainError, match="not_bound"):
        normalize_bound_state(scattering, params)


@pytest.mark.parametrize(("z_lo", "z_hi"), [(0.3, 2.7), (3.3, 6.0), (-3.0, -0.3)])
def test_assembled_bound_state_solves_the_dirac_system(
    finite_well: PhysicalParams, z_lo: float, z_hi: float
) -> None:
    solution = bound_states(finite_well)[0]
    grid = SpacetimeGrid.rectangle(z_lo=z_lo, z_hi=z_hi, t_lo=0.0, t_hi=1.0, nz=10, nt=4)

    report = fd_residual(
        PDEKind.DIRAC_SYSTEM,
        assemble_spinor(solution, finite_well),
        grid,
        params=finite_well,
        potential=well_potential(finite_well),
    )

    assert report.passes(1e-6)


def test_bound_spinor_is_continuous_at_both_walls(finite_well: PhysicalParams) -> None:
    field = assemble_spinor(bound_states(finite_well)[0], finite_well)
    z = np.array([-1e-13, 0.0, 3.0, 3.0 + 1e-13])
    phi0, phi2 = field(z, np.zeros_like(z))

    assert np.allclose(phi0[0], phi0[1], atol=1e-10)
    assert np.allclose(phi2[0], phi2[1], atol=1e-10)
    assert np.allclose(phi0[2], phi0[3], atol=1e-10)
    assert np.allclose(phi2[2], phi2[3], atol=1e-10)


def test_scattering_conserves_current_above_the_barrier() -> None:
    params = PhysicalParams(m=1.0, V0=5.0, L0=1.5)
    result = scattering_coefficients(7.0, params)

    assert not result.klein_zone
    assert result.total == pytest.approx(1.0, abs=1e-10)
    assert 0.0 <= result.reflection <= 1.0
    assert result.solution.plug_back_residual <= PLUG_BACK_TOLERANCE


def test_scattering_in_the_klein_zone_conserves_current() -> None:
    params = PhysicalParams(m=1.0, V0=5.0, L0=1.5)
    result = scattering_coefficients(2.0, params)

    assert result.klein_zone
    assert result.total == pytest.approx(1.0, abs=1e-10)
    assert result.solution.coeffs.q == 0


def test_empty_well_transmits_everything() -> None:
    result = scattering_coefficients(2.0, PhysicalParams(m=1.0, V0=0.0, L0=1.5))

    assert result.transmission == pytest.approx(1.0, abs=1e-12)
    assert result.reflection == pytest.approx(0.0, abs=1e-12)


def test_scattering_rejects_evanescent_and_threshold_energies() -> None:
    params = PhysicalParams(m=1.0, V0=5.0, L0=1.5)

    with pytest.raises(DomainError, match="evanescent_outer"):
        scattering_coefficients(5.5, params)
    with pytest.raises(DomainError, match="outer_threshold"):
        scattering_coefficients(6.0, params)


def test_reciprocal_matching_disagrees_with_continuity() -> None:
    params = PhysicalParams(m=1.0, V0=5.0, L0=1.5)
    solution = scattering_coefficients(7.0, params).solution

    assert plug_back_residual(7.0, solution.coeffs, params) <= PLUG_BACK_TOLERANCE
    assert plug_back_residual(7.0, solution.coeffs, params, matching="reciprocal") > 1e-6


def test_shallow_wide_well_matches_schrodinger_levels() -> None:
    v0, length = 1e-3, 200.0
    params = PhysicalParams(m=1.0, V0=v0, L0=length)
    solutions = bound_states(params)
    reference = schrodinger_well_oracle(v0, length, 1.0)

    assert len(solutions) == len(reference) > 0
    for solution, expected in zip(solutions, reference, strict=True):
        assert (solution.E - params.rest_energy) == pytest.approx(expected, rel=1e-2)


def test_matching_is_the_identity_without_a_step() -> None:
    params = PhysicalParams(m=1.0, V0=0.0, L0=1.5)
    h, j = 0.7 - 0.2j, -0.3 + 1.1j

    s, b = match_at_zero(h, j, 2.0, params)
    q, r = match_at_L(h, j, 2.0, params)

    assert s == pytest.approx(h, abs=1e-14)
    assert b == pytest.approx(j, abs=1e-14)
    assert q == pytest.approx(h, abs=1e-14)
    assert r == pytest.approx(j, abs=1e-14)


@pytest.mark.parametrize("energy", [2.0, 7.0])
def test_vanishing_width_collapses_both_interfaces(energy: float) -> None:
    params = PhysicalParams(m=1.0, V0=5.0 if energy > 6.0 else 1.5, L0=1e-12)
    h, j = 0.7 - 0.2j, -0.3 + 1.1j

    s, b = match_at_zero(h, j, energy, params)
    q, r = match_at_L(h, j, energy, params)

    assert q == pytest.approx(s, abs=1e-10)
    assert r == pytest.approx(b, abs=1e-10)


@pytest.mark.parametrize(
    ("region", "z_lo", "z_hi"),
    [("II", 0.3, 2.7), ("III", 3.3, 6.0), ("I", -3.0, -0.3)],
)
@pytest.mark.parametrize("direction", [1, -1])
def test_plane_waves_solve_the_dirac_system_in_their_region(
    finite_well: PhysicalParams, region: Region, z_lo: float, z_hi: float, direction: int
) -> None:
    numbers = wave_numbers(2.0, finite_well)
    k = numbers.k1 if region == "II" else numbers.k2
    grid = SpacetimeGrid.rectangle(z_lo=z_lo, z_hi=z_hi, t_lo=0.0, t_hi=1.0, nz=10, nt=4)

    report = fd_residual(
        PDEKind.DIRAC_SYSTEM,
        spinor_plane_wave(k, 2.0, direction, region, finite_well),
        grid,
        params=finite_well,
        potential=well_potential(finite_well),
    )

    assert report.passes(1e-6)


def test_outer_plane_wave_decays_inside_the_bound_window(finite_well: PhysicalParams) -> None:
    k2 = wave_numbers(2.0, finite_well).k2
    wave = spinor_plane_wave(k2, 2.0, 1, "III", finite_well)
    z = np.linspace(3.0, 13.0, 11)

    phi0, phi2 = wave(z, np.zeros_like(z))
    magnitude = np.abs(phi0)

    assert k2.imag > 0
    assert np.all(np.diff(magnitude) < 0)
    assert magnitude[1:] / magnitude[:-1] == pytest.approx(np.full(10, math.exp(-k2.imag)), rel=1e-12)
    assert np.abs(phi2) == pytest.approx(abs(spinor_ratio(k2, 2.0, 1.5, finite_well)) * magnitude, rel=1e-12)
