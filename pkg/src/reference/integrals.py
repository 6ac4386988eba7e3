"""
Deterministic quadratures for the conjectured probabilities and volumes

Conjecture integrals are taken over -1 <= y <= x <= 1 with weight
(1-x^2)^p (1-y^2)^p (x-y)^d and the separability function of
eps = sqrt((1-x)/(1+x)) / sqrt((1-y)/(1+y)) in the numerator. With
x = sin(theta) the endpoint factor becomes cos(theta)^(2p+1) and
sqrt((1-x)/(1+x)) = tan(pi/4 - theta/2), so nothing is evaluated at a
singular endpoint.
"""

import logging
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np
from mpmath import mp, mpf, atan as mp_atan, pi as mp_pi, sqrt as mp_sqrt
from scipy.integrate import IntegrationWarning, dblquad, quad

from src.config.config_main import quadrature_config
from src.errors import DomainError
from src.quantum.measures import MeasureKind, eig_weight_log_values, qubit_eig_weight_log
from src.reference.special import QuadratureError, sep_function_rule

logger = logging.getLogger(__name__)

HALF_PI = 0.5 * math.pi
QUARTER_PI = 0.25 * math.pi
SUPPORTED_D = (1, 2, 4)
INNER_NODES = 64


class ExponentFamily(Enum):
    HS = "hs"
    SQRTX = "sqrtx"
    ALT = "alt"

    def exponent(self, d: float) -> float:
        """Exponent p of (1 - x^2) and (1 - y^2)."""
        if self is ExponentFamily.HS:
            return float(d)
        if self is ExponentFamily.SQRTX:
            return -d / 4.0
        return (d - 2.0) / 4.0


@dataclass(frozen=True)
class QuadratureResult:
    numerator: float
    denominator: float
    ratio: float
    divergent: bool = False

    @classmethod
    def diverged(cls, numerator: float = math.nan) -> "QuadratureResult":
        return cls(numerator=numerator, denominator=math.inf, ratio=math.nan, divergent=True)


def _checked(integrate: Callable[[], Tuple[float, float]], label: str, epsabs: float, epsrel: float) -> float:
    """Run a scipy integrator, demoting its warnings to a convergence check."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IntegrationWarning)
        value, error = integrate()

    if not math.isfinite(value):
        raise QuadratureError(f"{label}: non-finite quadrature value")
    allowed = 1e3 * max(epsabs, epsrel * abs(value))
    for warning in caught:
        logger.warning(f"{label}: {warning.message}")
    if caught and error > allowed:
        raise QuadratureError(f"{label}: estimated error {error:.3e} exceeds {allowed:.3e}")
    return value


def _eps_of(theta: float, phi: float) -> float:
    ratio = math.tan(QUARTER_PI - 0.5 * theta) / math.tan(QUARTER_PI - 0.5 * phi)
    return min(1.0, max(0.0, ratio))


def _conjecture_integrands(d: int, p: float, sep: Callable[[float], float]):
    power = 2.0 * p + 1.0

    def weight(phi: float, theta: float) -> float:
        return (math.cos(theta) * math.cos(phi)) ** power * (math.sin(theta) - math.sin(phi)) ** d

    def numerator(phi: float, theta: float) -> float:
        return sep(_eps_of(theta, phi)) * weight(phi, theta)

    return numerator, weight


def _integrate_triangle(f, label: str, upper: float = HALF_PI) -> float:
    epsabs, epsrel = quadrature_config.epsabs, quadrature_config.epsrel
    return _checked(
        lambda: dblquad(f, -upper, upper, lambda t: -upper, lambda t: t, epsabs=epsabs, epsrel=epsrel),
        label, epsabs, epsrel,
    )


def _validate(d: int, family: ExponentFamily) -> None:
    if d not in SUPPORTED_D:
        raise DomainError(f"conjecture integrals are defined for d in {SUPPORTED_D}, got {d}")
    if not isinstance(family, ExponentFamily):
        raise DomainError(f"unknown exponent family {family!r}")


def sep_prob_quadrature(d: int, family: ExponentFamily) -> QuadratureResult:
    """
    Numerator, denominator and ratio of a conjectured separability probability.

    A denominator whose endpoint exponent p is <= -1 is not integrable and
    comes back as a divergent result.
    """
    _validate(d, family)
    p = family.exponent(d)
    label = f"d={d} {family.value}"
    if p <= -1.0:
        logger.info(f"{label}: endpoint exponent {p} makes the denominator infinite")
        return QuadratureResult.diverged()

    numerator_f, weight_f = _conjecture_integrands(d, p, sep_function_rule(d))
    numerator = _integrate_triangle(numerator_f, f"{label} numerator")
    denominator = _integrate_triangle(weight_f, f"{label} denominator")
    ratio = numerator / denominator
    logger.info(f"{label}: {numerator:.12g} / {denominator:.12g} = {ratio:.12g}")
    return QuadratureResult(numerator=numerator, denominator=denominator, ratio=ratio)


def truncated_denominator(d: int, family: ExponentFamily, delta: float) -> float:
    """Conjecture denominator restricted to |x|, |y| <= 1 - delta."""
    _validate(d, family)
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    p = family.exponent(d)
    _, weight_f = _conjecture_integrands(d, p, sep_function_rule(d))
    return _integrate_triangle(weight_f, f"d={d} {family.value} truncated at {delta:g}", math.asin(1.0 - delta))


def hs_abs_constant(digits: int = 30) -> float:
    """Closed-form Hilbert-Schmidt absolute-separability probability."""
    with mp.workdps(digits):
        root2 = mp_sqrt(2)
        value = mpf(29902415923) / 497664 + (
            -3217542976 + 5120883075 * mp_pi - 16386825840 * mp_atan(root2)
        ) / (32768 * root2)
        return float(value)


def hs_abs_constant_condensed(digits: int = 30) -> float:
    """The same constant over the common denominator 2^16 3^5."""
    with mp.workdps(digits):
        root2 = mp_sqrt(2)
        value = (
            32 * (29902415923 - 24433216974 * root2)
            + 248874917445 * root2 * (5 * mp_pi - 16 * mp_atan(root2))
        ) / (2 ** 16 * 3 ** 5)
        return float(value)


_GL_T, _GL_W = np.polynomial.legendre.leggauss(INNER_NODES)
_GL_T = 0.5 * (_GL_T + 1.0)
_GL_W = 0.5 * _GL_W


def _lambda2_integral(kind: MeasureKind, l3: float, l4: float, lower: float, upper: float) -> float:
    """Integral over l2 in [lower, upper] with l2 = lower + (upper - lower) t^2."""
    if upper <= lower:
        return 0.0
    span = upper - lower
    l2 = lower + span * _GL_T ** 2
    l1 = 1.0 - l2 - l3 - l4
    spectra = np.column_stack([l1, l2, np.full_like(l2, l3), np.full_like(l2, l4)])
    with np.errstate(over="ignore", invalid="ignore"):
        w = np.exp(eig_weight_log_values(kind, spectra))
    w = np.where(np.isfinite(w), w, 0.0)
    return float(np.dot(_GL_W, w * 2.0 * span * _GL_T))


def _abs_sep_lower(l3: float, l4: float) -> float:
    return max(l3, (math.sqrt(max(0.0, 1.0 - 2.0 * l3)) - math.sqrt(l4)) ** 2)


def _simplex_integral(kind: MeasureKind, absolutely: bool, label: str) -> float:
    """Ordered-simplex integral of the eigenvalue weight, l4 = s^2 in the outer level."""
    epsabs, epsrel = 0.0, 1e-9
    limit = quadrature_config.limit

    def over_l3(l3: float, l4: float) -> float:
        upper = 0.5 * (1.0 - l3 - l4)
        lower = _abs_sep_lower(l3, l4) if absolutely else l3
        return _lambda2_integral(kind, l3, l4, lower, upper)

    def over_s(s: float) -> float:
        l4 = s * s
        top = (1.0 - l4) / 3.0
        if top <= l4:
            return 0.0
        inner = _checked(
            lambda: quad(over_l3, l4, top, args=(l4,), epsabs=epsabs, epsrel=epsrel, limit=limit),
            label, epsabs, epsrel,
        )
        return 2.0 * s * inner

    return _checked(
        lambda: quad(over_s, 0.0, 0.5, epsabs=epsabs, epsrel=epsrel, limit=limit),
        label, epsabs, epsrel,
    )


def abs_sep_quadrature(kind: MeasureKind) -> QuadratureResult:
    """
    Absolute-separability probability of a measure from its eigenvalue density.

    The Haar factor and the 4! ordering factor are common to numerator and
    denominator, so both integrals run over the ordered simplex only.
    """
    if not kind.finite_volume:
        logger.info(f"{kind}: infinite volume, absolute-separability ratio undefined")
        return QuadratureResult.diverged()

    numerator = _simplex_integral(kind, True, f"{kind} absolutely separable")
    denominator = _simplex_integral(kind, False, f"{kind} simplex")
    if not denominator > 0.0:
        raise QuadratureError(f"{kind}: simplex integral vanished")
    ratio = numerator / denominator
    logger.info(f"{kind}: absolute-separability probability {ratio:.9g}")
    return QuadratureResult(numerator=numerator, denominator=denominator, ratio=ratio)


def qubit_volume(kind: MeasureKind) -> float:
    """Integral of the single-qubit eigenvalue weight over lambda in [0, 1]."""
    if not kind.finite_volume:
        return math.inf
    epsabs, epsrel = quadrature_config.epsabs, quadrature_config.epsrel

    def integrand(theta: float) -> float:
        lam = math.sin(theta) ** 2
        weight = qubit_eig_weight_log(kind, lam)
        if not weight.finite:
            return 0.0
        return math.exp(weight.log_value) * math.sin(2.0 * theta)

    return _checked(
        lambda: quad(integrand, 0.0, HALF_PI, epsabs=epsabs, epsrel=epsrel, limit=quadrature_config.limit),
        f"{kind} qubit volume", epsabs, epsrel,
    )


def qubit_volume_ratio(kind_a: MeasureKind, kind_b: MeasureKind) -> QuadratureResult:
    """Single-qubit volume of kind_a relative to kind_b (the Haar factor cancels)."""
    for kind in (kind_a, kind_b):
        if not kind.is_monotone:
            raise DomainError(f"{kind} is not an operator-monotone measure")

    volume_a = qubit_volume(kind_a)
    volume_b = qubit_volume(kind_b)
    if math.isinf(volume_a) or math.isinf(volume_b):
        return QuadratureResult(
            numerator=volume_a, denominator=volume_b, ratio=math.nan, divergent=True,
        )
    return QuadratureResult(numerator=volume_a, denominator=volume_b, ratio=volume_a / volume_b)


def max_deviation(f: Callable[[float], float], g: Callable[[float], float], grid) -> float:
    return max(abs(f(x) - g(x)) for x in grid)


def eps_grid(points: int = 99) -> np.ndarray:
    """Interior grid k/(points+1), k = 1..points."""
    return np.arange(1, points + 1) / (points + 1.0)


def conjecture_family(name: Optional[str]) -> ExponentFamily:
    try:
        return ExponentFamily(name.lower())
    except (AttributeError, ValueError):
        raise DomainError(f"unknown exponent family '{name}'")
