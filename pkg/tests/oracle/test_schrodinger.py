from __future__ import annotations

import math

import pytest

from movingwell.core import DomainError
from movingwell.oracle.schrodinger import schrodinger_well_oracle, well_strength

# Fixed point of cos; the single even state when the well strength is 1.
_DOTTIE = 0.7390851332151607


def test_unit_strength_well_has_one_state() -> None:
    assert well_strength(0.5, 2.0, 1.0) == pytest.approx(1.0)

    energies = schrodinger_well_oracle(0.5, 2.0, 1.0)

    assert energies == pytest.approx([_DOTTIE**2 / 2.0], rel=1e-12)


def test_deep_well_approaches_the_infinite_well() -> None:
    energies = schrodinger_well_oracle(1e4, 1.0, 1.0)
    infinite = [(n * math.pi) ** 2 / 2.0 for n in range(1, 4)]

    assert energies == sorted(energies)
    assert len(energies) == 46
    for level, bound in zip(energies, infinite, strict=False):
        assert 0.9 * bound < level < bound


def test_hbar_scales_the_levels() -> None:
    base = schrodinger_well_oracle(0.5, 2.0, 1.0)
    scaled = schrodinger_well_oracle(0.5 * 4.0, 2.0, 1.0, hbar=2.0)

    assert scaled == pytest.approx([4.0 * energy for energy in base], rel=1e-12)


def test_bad_wells_are_rejected() -> None:
    with pytest.raises(DomainError, match="bad_well"):
        schrodinger_well_oracle(0.0, 1.0, 1.0)
    with pytest.raises(DomainError, match="bad_well"):
        schrodinger_well_oracle(1.0, 1.0, 0.0)
