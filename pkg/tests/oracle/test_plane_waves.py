from __future__ import annotations

import math

import numpy as np
import pytest

from movingwell.core import DomainError, PhysicalParams
from movingwell.oracle.plane_waves import (
    dirac_plane_wave,
    dirac_plane_wave_energy,
    kg_dispersion,
    kg_plane_wave,
    u_plane_wave,
)


def test_kg_dispersion_relation() -> None:
    params = PhysicalParams(m=2.0, hbar=0.5, c=3.0)

    assert kg_dispersion(1.0, params) == pytest.approx(math.sqrt(9.0 + 36.0**2))


def test_kg_plane_wave_has_unit_modulus(free_params: PhysicalParams) -> None:
    z = np.linspace(-3.0, 3.0, 7)
    values = kg_plane_wave(2.0, free_params)(z, np.full_like(z, 0.4))

    assert np.allclose(np.abs(values), 1.0)


def test_dirac_energy_branches(free_params: PhysicalParams) -> None:
    assert dirac_plane_wave_energy(1.0, free_params) == pytest.approx(math.sqrt(2.0))
    assert dirac_plane_wave_energy(1.0, free_params, potential=3.0, branch=-1) == pytest.approx(3.0 - math.sqrt(2.0))

    with pytest.raises(DomainError, match="bad_branch"):
        dirac_plane_wave_energy(1.0, free_params, branch=0)


def test_negative_branch_normalises_the_larger_component(free_params: PhysicalParams) -> None:
    z = np.array([0.0])
    phi0, phi2 = dirac_plane_wave(1.0, free_params, branch=-1)(z, z)

    assert complex(phi2[0]) == pytest.approx(1.0)
    assert abs(complex(phi0[0])) < 1.0


def test_u_plane_wave_recombines_components(free_params: PhysicalParams) -> None:
    z = np.linspace(0.0, 1.0, 5)
    t = np.full_like(z, 0.3)
    phi0, phi2 = dirac_plane_wave(1.5, free_params)(z, t)
    u1, u2 = u_plane_wave(1.5, free_params)(z, t)

    assert np.allclose(u1, phi0 + phi2)
    assert np.allclose(u2, phi0 - phi2)
