"""Bessel functions J_ν and Y_ν of real, purely imaginary and complex order.

Real orders go to ``scipy.special.jv``/``yv`` (AMOS, including its dedicated
integer-order Y routine). Non-real orders are evaluated here with two
branches, each carrying an error estimate:

* the ascending power series Σ (-1)^k (x/2)^(ν+2k) / (k! Γ(ν+k+1)), with the
  leading coefficient from ``scipy.special.loggamma``;
* the Hankel large-argument expansion
  J_ν = √(2/πx) (P cos ω − Q sin ω), Y_ν = √(2/πx) (P sin ω + Q cos ω),
  ω = x − νπ/2 − π/4, truncated at its smallest term.

Per point, the branch with the smaller relative error estimate wins. Points that
neither branch certifies to the requested tolerance (large imaginary orders in
the window where the series has cancelled too far and the asymptotic series has
not yet converged) are re-evaluated with ``mpmath`` at 30 digits. With that
fallback disabled an uncertified point raises ``AccuracyError``.

Purely imaginary orders ν = iκ use J_{-iκ}(x) = conj(J_{iκ}(x)) for x > 0, so
Y needs a single series evaluation and conjugation symmetry holds exactly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import StrEnum
from typing import Literal, overload

import mpmath
import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import special

from movingwell.core import AccuracyError, DomainError
from movingwell.logging_config import log_with_fields

logger = logging.getLogger(__name__)

type RealArray = NDArray[np.float64]
type ComplexArray = NDArray[np.complex128]
type BesselKind = Literal["J", "Y"]

DEFAULT_TOLERANCE = 1e-10
ORDER_AXIS_TOLERANCE = 1e-14

_EPS = float(np.finfo(np.float64).eps)
_SERIES_MAX_TERMS = 2000
_SERIES_MAX_X = 600.0
_HANKEL_MIN_X = 4.0
_HANKEL_MAX_TERMS = 400
# Below this |sin νπ| the connection formula amplifies rounding past any useful tolerance.
_MIN_SIN_NU_PI = 1e-6
_FALLBACK_DPS = 30


class OrderClass(StrEnum):
    REAL = "real"
    IMAGINARY = "imaginary"
    GENERAL = "general"


class Branch(StrEnum):
    AMOS = "amos"
    SERIES = "series"
    HANKEL = "hankel"
    MPMATH = "mpmath"


@dataclass(frozen=True, slots=True)
class Order:
    nu: complex

    def __post_init__(self) -> None:
        value = complex(self.nu)
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise DomainError("non_finite_order", "Bessel order must be finite", {"nu": value})

    @property
    def classification(self) -> OrderClass:
        value = complex(self.nu)
        tolerance = ORDER_AXIS_TOLERANCE * max(1.0, abs(value))
        if abs(value.imag) <= tolerance:
            return OrderClass.REAL
        if abs(value.real) <= tolerance:
            return OrderClass.IMAGINARY
        return OrderClass.GENERAL

    def shifted(self, delta: float) -> Order:
        return Order(complex(self.nu) + delta)

    def conjugate(self) -> Order:
        return Order(complex(self.nu).conjugate())


@dataclass(frozen=True, slots=True)
class BesselEvaluation:
    """Values with absolute error estimates and the branch used at each point."""

    value: ComplexArray
    error_estimate: RealArray
    branch: NDArray[np.str_]


def as_order(nu: Order | complex | float) -> Order:
    if isinstance(nu, Order):
        return nu
    return Order(complex(nu))


def _as_argument(x: ArrayLike) -> RealArray:
    arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if arr.size == 0:
        return arr
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise DomainError("nonpositive_argument", "Bessel argument must be finite and > 0")
    return arr


def _envelope(nu: complex, x: RealArray) -> RealArray:
    # Magnitude scale of J_ν, Y_ν at large x; used to judge relative accuracy near zeros.
    growth = math.cosh(min(math.pi * abs(nu.imag) / 2.0, 700.0))
    return np.sqrt(2.0 / (math.pi * x)) * growth


def _series_j(nu: complex, x: RealArray) -> tuple[ComplexArray, RealArray]:
    half = x / 2.0
    lead_log = nu * np.log(half) - special.loggamma(nu + 1.0)
    term = np.exp(lead_log).astype(np.complex128)
    total = term.copy()
    abs_total = np.abs(term)
    q = -(half * half)
    peak_k = float(np.max(half)) ** 2
    for k in range(1, _SERIES_MAX_TERMS + 1):
        term = term * q / (k * (nu + k))
        total = total + term
        abs_total = abs_total + np.abs(term)
        past_peak = k * abs(nu + k) > peak_k
        if past_peak and np.all(np.abs(term) <= _EPS * np.abs(total)):
            break
    rounding = 4.0 * _EPS * abs_total + _EPS * np.abs(lead_log) * np.abs(total)
    error = rounding + np.abs(term)
    return total, error


def _hankel_pq(nu: complex, x: RealArray) -> tuple[ComplexArray, ComplexArray, RealArray]:
    mu = 4.0 * nu * nu
    p = np.ones_like(x, dtype=np.complex128)
    q = np.zeros_like(x, dtype=np.complex128)
    term = np.ones_like(x, dtype=np.complex128)
    previous = np.ones_like(x)
    peak = np.ones_like(x)
    error = np.full_like(x, np.inf)
    active = np.ones_like(x, dtype=bool)
    seen_decrease = np.zeros_like(x, dtype=bool)
    for k in range(1, _HANKEL_MAX_TERMS + 1):
        term = term * (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        magnitude = np.abs(term)
        diverging = active & seen_decrease & (magnitude > previous)
        error = np.where(diverging, previous, error)
        active &= ~diverging
        sign = 1.0 if (k // 2) % 2 == 0 else -1.0
        if k % 2 == 0:
            p = np.where(active, p + sign * term, p)
        else:
            q = np.where(active, q + sign * term, q)
        peak = np.where(active, np.maximum(peak, magnitude), peak)
        scale = np.abs(p) + np.abs(q)
        converged = active & (magnitude <= _EPS * scale)
        error = np.where(converged, magnitude, error)
        active &= ~converged
        seen_decrease |= magnitude < previous
        previous = magnitude
        if not np.any(active):
            break
    error = np.where(active, previous, error) + 4.0 * _EPS * peak
    return p, q, error


def _hankel(kind: BesselKind, nu: complex, x: RealArray) -> tuple[ComplexArray, RealArray]:
    p, q, pq_error = _hankel_pq(nu, x)
    omega = x - nu * math.pi / 2.0 - math.pi / 4.0
    cos_w = np.cos(omega)
    sin_w = np.sin(omega)
    prefactor = np.sqrt(2.0 / (math.pi * x))
    if kind == "J":
        value = prefactor * (p * cos_w - q * sin_w)
    else:
        value = prefactor * (p * sin_w + q * cos_w)
    error = prefactor * pq_error * (np.abs(cos_w) + np.abs(sin_w))
    return value, error


def _series(
    kind: BesselKind, order: Order, x: RealArray, *, force_general: bool
) -> tuple[ComplexArray, RealArray]:
    nu = complex(order.nu)
    j_plus, err_plus = _series_j(nu, x)
    if kind == "J":
        return j_plus, err_plus

    sin_nu_pi = np.sin(nu * math.pi)
    cos_nu_pi = np.cos(nu * math.pi)
    if abs(sin_nu_pi) < _MIN_SIN_NU_PI:
        return np.full_like(j_plus, np.nan), np.full_like(err_plus, np.inf)

    if order.classification == OrderClass.IMAGINARY and not force_general:
        j_minus, err_minus = np.conj(j_plus), err_plus
    else:
        j_minus, err_minus = _series_j(-nu, x)
    value = (j_plus * cos_nu_pi - j_minus) / sin_nu_pi
    error = (err_plus * abs(cos_nu_pi) + err_minus) / abs(sin_nu_pi)
    return value, error


def _evaluate_complex_order(
    kind: BesselKind, order: Order, x: RealArray, *, force_general: bool
) -> tuple[ComplexArray, RealArray, NDArray[np.str_]]:
    nu = complex(order.nu)
    value = np.full(x.shape, np.nan + 0j, dtype=np.complex128)
    error = np.full(x.shape, np.inf)
    branch = np.full(x.shape, Branch.SERIES.value, dtype="<U6")
    envelope = _envelope(nu, x)

    series_mask = x <= min(_SERIES_MAX_X, 40.0 + 2.0 * abs(nu))
    if np.any(series_mask):
        s_value, s_error = _series(kind, order, x[series_mask], force_general=force_general)
        value[series_mask] = s_value
        error[series_mask] = s_error

    hankel_mask = x >= _HANKEL_MIN_X
    if np.any(hankel_mask):
        h_value, h_error = _hankel(kind, nu, x[hankel_mask])
        current_rel = error[hankel_mask] / np.maximum(
            np.nan_to_num(np.abs(value[hankel_mask]), nan=0.0), envelope[hankel_mask]
        )
        hankel_rel = h_error / np.maximum(np.abs(h_value), envelope[hankel_mask])
        better = hankel_rel < current_rel
        idx = np.flatnonzero(hankel_mask)[better]
        value[idx] = h_value[better]
        error[idx] = h_error[better]
        branch[idx] = Branch.HANKEL.value

    return value, error, branch


def _relative_error(nu: complex, x: RealArray, value: ComplexArray, error: RealArray) -> RealArray:
    scale = np.nan_to_num(np.maximum(np.abs(value), _envelope(nu, x)), nan=0.0)
    relative = np.where(scale > 0, error / np.maximum(scale, 1e-300), np.inf)
    return np.nan_to_num(relative, nan=np.inf)


def _arbitrary_precision(kind: BesselKind, nu: complex, x: RealArray) -> ComplexArray:
    ctx = mpmath.MPContext()
    ctx.dps = _FALLBACK_DPS
    function = ctx.besselj if kind == "J" else ctx.bessely
    order = ctx.mpc(nu.real, nu.imag)
    values = [complex(function(order, ctx.mpf(float(point)))) for point in x]
    return np.array(values, dtype=np.complex128)


def _refine_uncertified(
    kind: BesselKind,
    order: Order,
    x: RealArray,
    value: ComplexArray,
    error: RealArray,
    branch: NDArray[np.str_],
    tolerance: float,
) -> None:
    nu = complex(order.nu)
    idx = np.flatnonzero(_relative_error(nu, x, value, error) > tolerance)
    if idx.size == 0:
        return
    refined = _arbitrary_precision(kind, nu, x[idx])
    value[idx] = refined
    error[idx] = 4.0 * _EPS * np.maximum(np.abs(refined), _envelope(nu, x[idx]) * 1e-3)
    branch[idx] = Branch.MPMATH.value
    log_with_fields(
        logger,
        logging.DEBUG,
        "bessel arbitrary-precision fallback",
        kind=kind,
        nu=nu,
        points=int(idx.size),
    )


def _certify(
    kind: BesselKind, order: Order, x: RealArray, evaluation: BesselEvaluation, tolerance: float
) -> None:
    relative = _relative_error(complex(order.nu), x, evaluation.value, evaluation.error_estimate)
    if np.all(relative <= tolerance):
        return
    worst = int(np.argmax(relative))
    log_with_fields(
        logger,
        logging.WARNING,
        "bessel evaluation not certified",
        kind=kind,
        nu=complex(order.nu),
        x=float(x[worst]),
        relative_error=float(relative[worst]),
        tolerance=tolerance,
    )
    raise AccuracyError(
        "bessel_not_certified",
        f"{kind}_{complex(order.nu)} at x={float(x[worst]):.6g} certified only to "
        f"{float(relative[worst]):.3g} (tolerance {tolerance:.3g})",
        {"nu": complex(order.nu), "x": float(x[worst]), "estimate": float(relative[worst])},
    )


def evaluate_bessel(
    kind: BesselKind,
    nu: Order | complex | float,
    x: ArrayLike,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
    force_general: bool = False,
    precision_fallback: bool = True,
) -> BesselEvaluation:
    """Evaluate J_ν(x) or Y_ν(x) with per-point error estimates.

    ``force_general`` disables the imaginary-order conjugation shortcut; it
    exists so the two Y paths can be certified against each other.
    ``precision_fallback=False`` reports uncertified points as ``AccuracyError``
    instead of handing them to ``mpmath``.
    """

    order = as_order(nu)
    arg = _as_argument(x)
    if arg.size == 0:
        return BesselEvaluation(
            value=np.zeros(0, dtype=np.complex128),
            error_estimate=np.zeros(0),
            branch=np.zeros(0, dtype="<U6"),
        )

    if order.classification == OrderClass.REAL and not force_general:
        real_nu = complex(order.nu).real
        raw = special.jv(real_nu, arg) if kind == "J" else special.yv(real_nu, arg)
        value = np.asarray(raw, dtype=np.complex128)
        evaluation = BesselEvaluation(
            value=value,
            error_estimate=8.0 * _EPS * np.maximum(np.abs(value), _envelope(real_nu, arg) * 1e-3),
            branch=np.full(arg.shape, Branch.AMOS.value, dtype="<U6"),
        )
        if not np.all(np.isfinite(value)):
            raise AccuracyError(
                "bessel_overflow",
                f"{kind}_{real_nu} is not finite on the requested arguments",
                {"nu": real_nu},
            )
        return evaluation

    # Branch selection and the fallback index flat points.
    flat = arg.ravel()
    value, error, branch = _evaluate_complex_order(kind, order, flat, force_general=force_general)
    if precision_fallback:
        _refine_uncertified(kind, order, flat, value, error, branch, tolerance)
    _certify(kind, order, flat, BesselEvaluation(value=value, error_estimate=error, branch=branch), tolerance)
    return BesselEvaluation(
        value=value.reshape(arg.shape),
        error_estimate=error.reshape(arg.shape),
        branch=branch.reshape(arg.shape),
    )


@overload
def _unwrap(x: float, values: ComplexArray) -> complex: ...


@overload
def _unwrap(x: ArrayLike, values: ComplexArray) -> complex | ComplexArray: ...


def _unwrap(x: ArrayLike, values: ComplexArray) -> complex | ComplexArray:
    if np.ndim(x) == 0:
        return complex(values[0])
    return values.reshape(np.shape(x))


def bessel_j(
    nu: Order | complex | float, x: ArrayLike, *, tolerance: float = DEFAULT_TOLERANCE
) -> complex | ComplexArray:
    return _unwrap(x, evaluate_bessel("J", nu, x, tolerance=tolerance).value)


def bessel_y(
    nu: Order | complex | float, x: ArrayLike, *, tolerance: float = DEFAULT_TOLERANCE
) -> complex | ComplexArray:
    return _unwrap(x, evaluate_bessel("Y", nu, x, tolerance=tolerance).value)


def evaluate_bessel_dx(
    kind: BesselKind,
    nu: Order | complex | float,
    x: ArrayLike,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
) -> BesselEvaluation:
    """C'_ν = (C_{ν-1} − C_{ν+1}) / 2."""

    order = as_order(nu)
    lower = evaluate_bessel(kind, order.shifted(-1.0), x, tolerance=tolerance)
    upper = evaluate_bessel(kind, order.shifted(1.0), x, tolerance=tolerance)
    return BesselEvaluation(
        value=(lower.value - upper.value) / 2.0,
        error_estimate=(lower.error_estimate + upper.error_estimate) / 2.0,
        branch=lower.branch,
    )


def bessel_j_dx(
    nu: Order | complex | float, x: ArrayLike, *, tolerance: float = DEFAULT_TOLERANCE
) -> complex | ComplexArray:
    return _unwrap(x, evaluate_bessel_dx("J", nu, x, tolerance=tolerance).value)


def bessel_y_dx(
    nu: Order | complex | float, x: ArrayLike, *, tolerance: float = DEFAULT_TOLERANCE
) -> complex | ComplexArray:
    return _unwrap(x, evaluate_bessel_dx("Y", nu, x, tolerance=tolerance).value)


def bessel_combination(
    nu: Order | complex | float,
    x: ArrayLike,
    c_j: complex,
    c_y: complex,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ComplexArray:
    """c_j·J_ν(x) + c_y·Y_ν(x), skipping the Y evaluation when c_y = 0."""

    arg = np.asarray(x, dtype=np.float64)
    result = np.zeros(np.shape(arg), dtype=np.complex128)
    if c_j != 0:
        result = result + c_j * evaluate_bessel("J", nu, arg, tolerance=tolerance).value.reshape(
            np.shape(arg)
        )
    if c_y != 0:
        result = result + c_y * evaluate_bessel("Y", nu, arg, tolerance=tolerance).value.reshape(
            np.shape(arg)
        )
    return result
