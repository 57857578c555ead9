"""Stationary Dirac solutions in the static finite well.

The potential is V0 in region I (z < 0), 0 in region II (0 < z < L0) and V0 in
region III (z > L0). In each region the solution is

    I:   s e^{ik₂z}(1, α₂) + b e^{−ik₂z}(1, −α₂)
    II:  h e^{ik₁z}(1, α₁) + J e^{−ik₁z}(1, −α₁)
    III: q e^{ik₂z}(1, α₂) + r e^{−ik₂z}(1, −α₂)

with α = ħck/(E − V + mc²). Matching is continuity of both spinor components at
z = 0 and z = L0.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike
from scipy import optimize

from movingwell.core import (
    ComplexArray,
    ConvergenceError,
    DomainError,
    PairSampler,
    PhysicalParams,
    Potential,
    RealArray,
)
from movingwell.logging_config import log_with_fields
from movingwell.parallel import map_panels, split_panels

logger = logging.getLogger(__name__)

type Region = Literal["I", "II", "III"]
type MatchingMode = Literal["continuity", "reciprocal"]
type PhaseConvention = Literal["global", "per-region"]
type SolutionKind = Literal["bound", "scattering"]

PLUG_BACK_TOLERANCE = 1e-10
_POLE_TOLERANCE = 1e-14
_NEWTON_STEPS = 2

# Columns of the matching matrix.
_COEFFICIENT_NAMES = ("s", "b", "h", "J", "q", "r")


@dataclass(frozen=True, slots=True)
class WaveNumbers:
    k1: complex
    k2: complex
    E: float


@dataclass(frozen=True, slots=True)
class StaticCoefficients:
    s: complex
    b: complex
    h: complex
    J: complex
    q: complex
    r: complex

    def as_vector(self) -> ComplexArray:
        return np.array([self.s, self.b, self.h, self.J, self.q, self.r], dtype=np.complex128)

    @classmethod
    def from_vector(cls, values: ArrayLike) -> StaticCoefficients:
        s, b, h, j, q, r = (complex(value) for value in np.asarray(values).ravel())
        return cls(s=s, b=b, h=h, J=j, q=q, r=r)

    def scaled(self, factor: complex) -> StaticCoefficients:
        return StaticCoefficients.from_vector(self.as_vector() * factor)


@dataclass(frozen=True, slots=True)
class StaticSolution:
    E: float
    coeffs: StaticCoefficients
    kind: SolutionKind
    wave_numbers: WaveNumbers
    plug_back_residual: float


@dataclass(frozen=True, slots=True)
class ScatteringResult:
    reflection: float
    transmission: float
    solution: StaticSolution
    klein_zone: bool

    @property
    def total(self) -> float:
        return self.reflection + self.transmission


def _require_finite_well(params: PhysicalParams) -> float:
    if params.V0 is None:
        raise DomainError(
            "infinite_walls",
            "the static finite well needs a finite V0",
            {"well_convention": params.well_convention},
        )
    return params.V0


def _wave_number(energy: float, potential: float, params: PhysicalParams) -> complex:
    # Principal branch: Re k ≥ 0 and Im k ≥ 0 when the radicand is negative.
    radicand = (energy - potential) ** 2 - params.rest_energy**2
    return cmath.sqrt(complex(radicand, 0.0)) / (params.hbar * params.c)


def wave_numbers(E: float, params: PhysicalParams) -> WaveNumbers:
    v0 = _require_finite_well(params)
    return WaveNumbers(k1=_wave_number(E, 0.0, params), k2=_wave_number(E, v0, params), E=E)


def region_potential(region: Region, params: PhysicalParams) -> float:
    v0 = _require_finite_well(params)
    return 0.0 if region == "II" else v0


def spinor_ratio(k: complex, E: float, potential: float, params: PhysicalParams) -> complex:
    """Lower-to-upper component ratio α = ħck/(E − V + mc²)."""

    denominator = E - potential + params.rest_energy
    if abs(denominator) <= _POLE_TOLERANCE * max(abs(E), abs(potential), params.rest_energy, 1.0):
        raise DomainError(
            "spinor_pole",
            "E - V + mc^2 vanishes; the plane-wave spinor is not normalisable this way",
            {"E": E, "V": potential},
        )
    return params.hbar * params.c * k / denominator


def _time_phase(
    E: float, potential: float, t: RealArray, params: PhysicalParams, convention: PhaseConvention
) -> ComplexArray:
    energy = E if convention == "global" else E - potential
    return np.exp(-1j * energy * t / params.hbar)


def spinor_plane_wave(
    k: complex,
    E: float,
    direction: int,
    region: Region,
    params: PhysicalParams,
    *,
    phase_convention: PhaseConvention = "global",
) -> PairSampler:
    """e^{±ikz}(1, ±α) with the region's potential and the chosen time phase."""

    if direction not in (1, -1):
        raise DomainError("bad_direction", "direction must be +1 or -1", {"direction": direction})
    potential = region_potential(region, params)
    alpha = spinor_ratio(k, E, potential, params)

    def sample(z: RealArray, t: RealArray) -> tuple[ComplexArray, ComplexArray]:
        z_arr = np.asarray(z, dtype=np.float64)
        t_arr = np.asarray(t, dtype=np.float64)
        wave = np.exp(1j * direction * k * z_arr) * _time_phase(E, potential, t_arr, params, phase_convention)
        return wave.astype(np.complex128), (direction * alpha * wave).astype(np.complex128)

    return sample


def _ratios(E: float, params: PhysicalParams) -> tuple[WaveNumbers, complex, complex]:
    v0 = _require_finite_well(params)
    numbers = wave_numbers(E, params)
    if numbers.k2 == 0:
        raise DomainError(
            "outer_threshold",
            "k2 = 0 at |E - V0| = mc^2; the outer plane waves are degenerate",
            {"E": E, "V0": v0},
        )
    alpha1 = spinor_ratio(numbers.k1, E, 0.0, params)
    alpha2 = spinor_ratio(numbers.k2, E, v0, params)
    return numbers, alpha1, alpha2


def matching_matrix(E: float, params: PhysicalParams, *, matching: MatchingMode = "continuity") -> ComplexArray:
    """4×6 matrix M with M·(s, b, h, J, q, r) = 0 for a matched solution."""

    numbers, alpha1, alpha2 = _ratios(E, params)
    e1 = cmath.exp(1j * numbers.k1 * params.L0)
    e2 = cmath.exp(1j * numbers.k2 * params.L0)
    if matching == "continuity":
        zero_lower = [alpha2, -alpha2, -alpha1, alpha1, 0.0, 0.0]
    else:
        if alpha1 == 0:
            raise DomainError(
                "reciprocal_singular", "the reciprocal z = 0 ratio is singular at k1 = 0", {"E": E}
            )
        zero_lower = [alpha1, -alpha1, -alpha2, alpha2, 0.0, 0.0]
    return np.array(
        [
            [1.0, 1.0, -1.0, -1.0, 0.0, 0.0],
            zero_lower,
            [0.0, 0.0, -e1, -1.0 / e1, e2, 1.0 / e2],
            [0.0, 0.0, -alpha1 * e1, alpha1 / e1, alpha2 * e2, -alpha2 / e2],
        ],
        dtype=np.complex128,
    )


def match_at_zero(
    h: complex, J: complex, E: float, params: PhysicalParams, *, matching: MatchingMode = "continuity"
) -> tuple[complex, complex]:
    """(s, b) from (h, J) across z = 0."""

    _, alpha1, alpha2 = _ratios(E, params)
    if matching == "continuity":
        ratio = alpha1 / alpha2
    else:
        if alpha1 == 0:
            raise DomainError(
                "reciprocal_singular", "the reciprocal z = 0 ratio is singular at k1 = 0", {"E": E}
            )
        ratio = alpha2 / alpha1
    total = h + J
    difference = ratio * (h - J)
    return (total + difference) / 2.0, (total - difference) / 2.0


def match_at_L(h: complex, J: complex, E: float, params: PhysicalParams) -> tuple[complex, complex]:
    """(q, r) from (h, J) across z = L0."""

    numbers, alpha1, alpha2 = _ratios(E, params)
    ratio = alpha1 / alpha2
    inner_plus = h * cmath.exp(1j * numbers.k1 * params.L0)
    inner_minus = J * cmath.exp(-1j * numbers.k1 * params.L0)
    total = inner_plus + inner_minus
    difference = ratio * (inner_plus - inner_minus)
    q = cmath.exp(-1j * numbers.k2 * params.L0) * (total + difference) / 2.0
    r = cmath.exp(1j * numbers.k2 * params.L0) * (total - difference) / 2.0
    return q, r


def plug_back_residual(
    E: float,
    coeffs: StaticCoefficients,
    params: PhysicalParams,
    *,
    matching: MatchingMode = "continuity",
) -> float:
    """Largest relative residual over the four matching equations."""

    matrix = matching_matrix(E, params, matching=matching)
    terms = matrix * coeffs.as_vector()[np.newaxis, :]
    residual = np.abs(terms.sum(axis=1))
    scale = np.abs(terms).sum(axis=1)
    relative = np.where(scale > 0, residual / np.where(scale > 0, scale, 1.0), 0.0)
    return float(relative.max())


def bound_window(params: PhysicalParams) -> tuple[float, float] | None:
    """Energies with E > mc² and |E − V0| < mc², or None when empty."""

    v0 = _require_finite_well(params)
    rest = params.rest_energy
    if v0 <= 0 or rest <= 0:
        return None
    lower = max(rest, v0 - rest)
    upper = v0 + rest
    return (lower, upper) if lower < upper else None


def _determinant_parts(
    energy: RealArray, params: PhysicalParams
) -> tuple[RealArray, RealArray, RealArray, RealArray, RealArray]:
    v0 = _require_finite_well(params)
    rest = params.rest_energy
    hbar_c = params.hbar * params.c
    k1 = np.sqrt(np.maximum(energy**2 - rest**2, 0.0)) / hbar_c
    kappa = np.sqrt(np.maximum(rest**2 - (energy - v0) ** 2, 0.0)) / hbar_c
    return k1, kappa, energy + rest, energy - v0 + rest, k1 * params.L0


def bound_state_determinant(E: ArrayLike, params: PhysicalParams) -> float | RealArray:
    """Pole-free determinant of the decaying-solution system; zeros are bound energies.

    D(E) = 2k₁κPQ cos(k₁L0) − (k₁²Q² − κ²P²) sin(k₁L0), P = E + mc², Q = E − V0 + mc².
    """

    window = bound_window(params)
    energy = np.asarray(E, dtype=np.float64)
    if window is None or np.any(energy < window[0]) or np.any(energy > window[1]):
        raise DomainError(
            "outside_bound_window",
            "the bound-state determinant is defined on max(mc^2, V0-mc^2) <= E <= V0+mc^2",
            {"window": window},
        )
    k1, kappa, p, q, theta = _determinant_parts(energy, params)
    value = 2.0 * k1 * kappa * p * q * np.cos(theta) - (k1**2 * q**2 - kappa**2 * p**2) * np.sin(theta)
    if value.ndim == 0:
        return float(value)
    return value


def _determinant_slope(E: float, params: PhysicalParams) -> float:
    v0 = _require_finite_well(params)
    hbar_c2 = (params.hbar * params.c) ** 2
    k1, kappa, p, q, theta = (float(part) for part in _determinant_parts(np.asarray(E), params))
    if k1 == 0.0 or kappa == 0.0:
        return math.nan
    dk1 = E / (hbar_c2 * k1)
    dkappa = -(E - v0) / (hbar_c2 * kappa)
    k1_dk1 = E / hbar_c2
    kappa_dkappa = -(E - v0) / hbar_c2
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    length = params.L0
    return (
        2.0 * cos_t * (dk1 * kappa * p * q + k1 * dkappa * p * q + k1 * kappa * (p + q))
        - 2.0 * k1 * kappa * p * q * sin_t * dk1 * length
        - (2.0 * k1_dk1 * q**2 + 2.0 * k1**2 * q - 2.0 * kappa_dkappa * p**2 - 2.0 * kappa**2 * p) * sin_t
        - (k1**2 * q**2 - kappa**2 * p**2) * cos_t * dk1 * length
    )


def _polish(E: float, lo: float, hi: float, params: PhysicalParams) -> float:
    best = E
    best_value = abs(float(bound_state_determinant(E, params)))
    for _ in range(_NEWTON_STEPS):
        slope = _determinant_slope(best, params)
        if not math.isfinite(slope) or slope == 0.0:
            break
        candidate = best - float(bound_state_determinant(best, params)) / slope
        if not lo <= candidate <= hi:
            break
        value = abs(float(bound_state_determinant(candidate, params)))
        if value > best_value:
            break
        best, best_value = candidate, value
    return best


def _bound_solution(E: float, params: PhysicalParams) -> StaticSolution:
    _, alpha1, alpha2 = _ratios(E, params)
    h = 1.0 + 0j
    J = (alpha1 + alpha2) / (alpha1 - alpha2)
    _, b = match_at_zero(h, J, E, params)
    q, _ = match_at_L(h, J, E, params)
    coeffs = StaticCoefficients(s=0j, b=b, h=h, J=J, q=q, r=0j)
    return StaticSolution(
        E=E,
        coeffs=coeffs,
        kind="bound",
        wave_numbers=wave_numbers(E, params),
        plug_back_residual=plug_back_residual(E, coeffs, params),
    )


def _scan_panel(energies: RealArray, params: PhysicalParams) -> RealArray:
    return np.asarray(bound_state_determinant(energies, params), dtype=np.float64)


def bound_states(
    params: PhysicalParams,
    *,
    scan_points: int = 2000,
    bisection_tolerance: float = 1e-10,
    threads: int = 1,
) -> list[StaticSolution]:
    """All bound states in the window, ascending in energy."""

    window = bound_window(params)
    if window is None:
        log_with_fields(logger, logging.INFO, "bound window empty", V0=params.V0, m=params.m)
        return []
    lo, hi = window
    # Interior points only: E = mc² and E = V0 − mc² are spurious zeros of the determinant.
    energies = lo + (hi - lo) * np.arange(1, scan_points + 1) / (scan_points + 1)
    panels = [energies[index.start : index.stop] for index in split_panels(scan_points, threads)]
    values = np.concatenate(map_panels(lambda panel: _scan_panel(panel, params), panels, threads=threads))

    scale = params.rest_energy
    solutions: list[StaticSolution] = []
    for index in range(scan_points - 1):
        left, right = float(values[index]), float(values[index + 1])
        a, b = float(energies[index]), float(energies[index + 1])
        if left == 0.0:
            root = a
        elif left * right < 0.0:
            try:
                root = float(
                    optimize.bisect(
                        lambda energy: float(bound_state_determinant(energy, params)),
                        a,
                        b,
                        xtol=bisection_tolerance * scale,
                        maxiter=500,
                    )
                )
            except RuntimeError as exc:
                raise ConvergenceError(
                    "bisection_failed",
                    str(exc),
                    {"bracket": (a, b), "values": (left, right)},
                ) from exc
            root = _polish(root, a, b, params)
        else:
            continue
        solution = _bound_solution(root, params)
        if solution.plug_back_residual > PLUG_BACK_TOLERANCE:
            raise ConvergenceError(
                "bound_state_plug_back",
                f"plug-back residual {solution.plug_back_residual:.3g} at E={root:.17g}",
                {"bracket": (a, b), "values": (left, right), "E": root},
            )
        solutions.append(solution)
        log_with_fields(
            logger,
            logging.DEBUG,
            "bound state found",
            index=len(solutions),
            E=root,
            plug_back=solution.plug_back_residual,
        )

    log_with_fields(
        logger,
        logging.INFO,
        "bound states complete",
        count=len(solutions),
        window_lo=lo,
        window_hi=hi,
        scan_points=scan_points,
    )
    return solutions


def normalize_bound_state(solution: StaticSolution, params: PhysicalParams) -> StaticSolution:
    """Scale a bound solution so that ∫(|φ₀|² + |φ₂|²) dz = 1 over the whole line."""

    if solution.kind != "bound":
        raise DomainError("not_bound", "only bound solutions are normalisable", {"kind": solution.kind})
    _, alpha1, alpha2 = _ratios(solution.E, params)
    kappa = solution.wave_numbers.k2.imag
    k1 = solution.wave_numbers.k1.real
    length = params.L0
    c = solution.coeffs
    outer_weight = 1.0 + abs(alpha2) ** 2
    inner_weight_plus = 1.0 + abs(alpha1) ** 2
    inner_weight_cross = 1.0 - abs(alpha1) ** 2

    left = abs(c.b) ** 2 * outer_weight / (2.0 * kappa)
    right = abs(c.q) ** 2 * outer_weight * math.exp(-2.0 * kappa * length) / (2.0 * kappa)
    oscillating = (cmath.exp(2j * k1 * length) - 1.0) / (2j * k1)
    inner = (abs(c.h) ** 2 + abs(c.J) ** 2) * inner_weight_plus * length + inner_weight_cross * 2.0 * (
        c.h * c.J.conjugate() * oscillating
    ).real
    total = left + inner + right
    if not total > 0:
        raise DomainError("zero_norm", "bound solution has vanishing norm", {"E": solution.E})
    return replace(solution, coeffs=c.scaled(1.0 / math.sqrt(total)))


def scattering_coefficients(E: float, params: PhysicalParams) -> ScatteringResult:
    """Unit incident wave from the left; R and T from Dirac current ratios."""

    v0 = _require_finite_well(params)
    numbers, _, alpha2 = _ratios(E, params)
    if abs(numbers.k2.imag) > 0.0:
        raise DomainError(
            "evanescent_outer",
            "scattering needs a real k2, i.e. |E - V0| > mc^2",
            {"E": E, "V0": v0},
        )
    matrix = matching_matrix(E, params)
    # e^{+ik₂z} carries current 2cα₂; in the Klein zone α₂ < 0 and it moves left.
    klein_zone = alpha2.real < 0
    if klein_zone:
        incident, reflected, transmitted, absent = 1, 0, 5, 4
    else:
        incident, reflected, transmitted, absent = 0, 1, 4, 5
    unknown = [index for index in range(6) if index not in (incident, absent)]
    try:
        solved = np.linalg.solve(matrix[:, unknown], -matrix[:, incident])
    except np.linalg.LinAlgError as exc:
        raise DomainError("singular_matching", "the scattering system is singular", {"E": E}) from exc

    vector = np.zeros(6, dtype=np.complex128)
    vector[incident] = 1.0
    vector[unknown] = solved
    coeffs = StaticCoefficients.from_vector(vector)
    reflection = float(abs(vector[reflected]) ** 2)
    transmission = float(abs(vector[transmitted]) ** 2)
    solution = StaticSolution(
        E=E,
        coeffs=coeffs,
        kind="scattering",
        wave_numbers=numbers,
        plug_back_residual=plug_back_residual(E, coeffs, params),
    )
    log_with_fields(
        logger,
        logging.DEBUG,
        "scattering solved",
        E=E,
        R=reflection,
        T=transmission,
        klein_zone=klein_zone,
        incident=_COEFFICIENT_NAMES[incident],
    )
    return ScatteringResult(
        reflection=reflection, transmission=transmission, solution=solution, klein_zone=klein_zone
    )


def assemble_spinor(
    solution: StaticSolution,
    params: PhysicalParams,
    *,
    phase_convention: PhaseConvention = "global",
) -> PairSampler:
    """Piecewise spinor field (z, t) ↦ (φ₀, φ₂) over all three regions."""

    v0 = _require_finite_well(params)
    E = solution.E
    numbers, alpha1, alpha2 = _ratios(E, params)
    k1, k2 = numbers.k1, numbers.k2
    c = solution.coeffs
    length = params.L0

    def pair(
        z: RealArray, amp_plus: complex, amp_minus: complex, k: complex, alpha: complex
    ) -> tuple[ComplexArray, ComplexArray]:
        plus = amp_plus * np.exp(1j * k * z)
        minus = amp_minus * np.exp(-1j * k * z)
        return plus + minus, alpha * (plus - minus)

    def sample(z: RealArray, t: RealArray) -> tuple[ComplexArray, ComplexArray]:
        z_arr, t_arr = np.broadcast_arrays(np.asarray(z, dtype=np.float64), np.asarray(t, dtype=np.float64))
        upper = np.zeros(z_arr.shape, dtype=np.complex128)
        lower = np.zeros(z_arr.shape, dtype=np.complex128)
        regions = (
            (z_arr < 0.0, c.s, c.b, k2, alpha2, v0),
            ((z_arr >= 0.0) & (z_arr <= length), c.h, c.J, k1, alpha1, 0.0),
            (z_arr > length, c.q, c.r, k2, alpha2, v0),
        )
        for mask, amp_plus, amp_minus, k, alpha, potential in regions:
            if not np.any(mask):
                continue
            phase = _time_phase(E, potential, t_arr[mask], params, phase_convention)
            first, second = pair(z_arr[mask], amp_plus, amp_minus, k, alpha)
            upper[mask] = first * phase
            lower[mask] = second * phase
        return upper, lower

    return sample


def well_potential(params: PhysicalParams) -> Potential:
    """V(z) of the static well, for residual checks of assembled fields."""

    v0 = _require_finite_well(params)
    length = params.L0

    def potential(z: RealArray) -> RealArray:
        z_arr = np.asarray(z, dtype=np.float64)
        return np.where((z_arr >= 0.0) & (z_arr <= length), 0.0, v0)

    return potential
