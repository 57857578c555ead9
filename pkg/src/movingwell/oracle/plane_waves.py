"""Exact plane-wave solutions used as positive and negative controls."""

from __future__ import annotations

import math

import numpy as np

from movingwell.core import (
    ComplexArray,
    DomainError,
    PairSampler,
    PhysicalParams,
    RealArray,
    ScalarSampler,
)


def kg_dispersion(k: float, params: PhysicalParams) -> float:
    """ω with ħ²ω² = ħ²c²k² + m²c⁴."""

    return math.sqrt((params.c * k) ** 2 + (params.rest_energy / params.hbar) ** 2)


def kg_plane_wave(k: float, params: PhysicalParams, *, omega_scale: float = 1.0) -> ScalarSampler:
    """e^{i(kz − ωt)}; ``omega_scale`` ≠ 1 breaks the dispersion relation on purpose."""

    omega = kg_dispersion(k, params) * omega_scale

    def sample(z: RealArray, t: RealArray) -> ComplexArray:
        return np.exp(1j * (k * np.asarray(z) - omega * np.asarray(t)))

    return sample


def dirac_plane_wave_energy(k: float, params: PhysicalParams, *, potential: float = 0.0, branch: int = 1) -> float:
    if branch not in (1, -1):
        raise DomainError("bad_branch", "energy branch must be +1 or -1", {"branch": branch})
    return potential + branch * math.sqrt((params.hbar * params.c * k) ** 2 + params.rest_energy**2)


def dirac_plane_wave(
    k: float,
    params: PhysicalParams,
    *,
    potential: float = 0.0,
    branch: int = 1,
) -> PairSampler:
    """Free Dirac plane wave of energy V ± √(ħ²c²k² + m²c⁴) in a constant potential V."""

    energy = dirac_plane_wave_energy(k, params, potential=potential, branch=branch)
    momentum = params.hbar * params.c * k
    plus = energy - potential + params.rest_energy
    minus = energy - potential - params.rest_energy
    if abs(plus) >= abs(minus):
        upper, lower = 1.0 + 0j, complex(momentum / plus)
    else:
        upper, lower = complex(momentum / minus), 1.0 + 0j

    def sample(z: RealArray, t: RealArray) -> tuple[ComplexArray, ComplexArray]:
        phase = np.exp(1j * (k * np.asarray(z) - energy * np.asarray(t) / params.hbar))
        return upper * phase, lower * phase

    return sample


def u_plane_wave(
    k: float,
    params: PhysicalParams,
    *,
    potential: float = 0.0,
    branch: int = 1,
) -> PairSampler:
    """(U₁, U₂) = (φ₀ + φ₂, φ₀ − φ₂) of ``dirac_plane_wave``."""

    dirac = dirac_plane_wave(k, params, potential=potential, branch=branch)

    def sample(z: RealArray, t: RealArray) -> tuple[ComplexArray, ComplexArray]:
        phi0, phi2 = dirac(z, t)
        return phi0 + phi2, phi0 - phi2

    return sample
