"""
Special functions behind the conjectured separability probabilities

- li2: real dilogarithm
- sep_function: normalized separability functions of the singular-value
  ratio eps, one per Dyson index d (closed forms at d = 1, 2, 4 and the
  regularized 3F2 series for general d)
- chi21: the induced-measure (k = 1) qubit variant
"""

import logging
import math
from typing import Callable, Union

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln

from src.config.config_main import quadrature_config
from src.errors import DomainError

logger = logging.getLogger(__name__)

PI2_6 = math.pi ** 2 / 6.0
LI2_SERIES_TERMS = 60
SMALL_EPS = 1e-3
SERIES_TOL = 1e-16
SERIES_ALARM = 1e-10

ArrayLike = Union[float, np.ndarray]


class QuadratureError(RuntimeError):
    """A quadrature or series did not converge."""


def _li2_series(z: float) -> float:
    total = 0.0
    power = z
    for k in range(1, LI2_SERIES_TERMS + 1):
        total += power / (k * k)
        power *= z
        if abs(power) < 1e-18:
            break
    return total


def li2(z: float) -> float:
    """
    Real dilogarithm Li2(z) = sum_{k>=1} z**k / k**2 for z <= 1.

    The series is used on |z| <= 1/2; reflection, Landen and inversion map
    every other argument into that disc.
    """
    z = float(z)
    if z > 1.0 or math.isnan(z):
        raise DomainError(f"li2 is real only for z <= 1, got {z}")
    if z == 1.0:
        return PI2_6
    if z == 0.0:
        return 0.0
    if abs(z) <= 0.5:
        return _li2_series(z)
    if z > 0.5:
        return PI2_6 - math.log(z) * math.log1p(-z) - _li2_series(1.0 - z)
    if z >= -1.0:
        # Landen: z/(z-1) lands in [1/3, 1/2)
        return -_li2_series(z / (z - 1.0)) - 0.5 * math.log1p(-z) ** 2
    return -PI2_6 - 0.5 * math.log(-z) ** 2 - li2(1.0 / z)


def _check_eps(eps: np.ndarray) -> None:
    if np.any(~((eps >= 0.0) & (eps <= 1.0))):
        raise DomainError("separability functions take eps in [0, 1]")


def eta2(eps: ArrayLike) -> ArrayLike:
    e2 = np.square(eps)
    return e2 * (4.0 - e2) / 3.0


def eta4(eps: ArrayLike) -> ArrayLike:
    e2 = np.square(eps)
    return e2 * e2 * (15.0 * e2 * e2 - 64.0 * e2 + 84.0) / 35.0


def chi21(eps: ArrayLike) -> ArrayLike:
    """Induced-measure (k = 1) qubit separability function, (1/4) eps^2 (3 - eps^2)^2."""
    eps = np.asarray(eps, dtype=np.float64)
    _check_eps(eps)
    e2 = eps * eps
    value = 0.25 * e2 * (3.0 - e2) ** 2
    return float(value) if value.ndim == 0 else value


def _chi1_small(eps: float) -> float:
    total = 8.0 * eps / 3.0
    e2 = eps * eps
    power = eps
    for m in range(1, 12):
        power *= e2
        total -= 8.0 * power / ((2 * m + 1) ** 2 * (2 * m - 1) * (2 * m + 3))
    return 4.0 / math.pi ** 2 * total


def chi1(eps: float) -> float:
    """Rebit (d = 1) separability function in dilogarithm closed form."""
    eps = float(eps)
    if eps < SMALL_EPS:
        return _chi1_small(eps)
    e2 = eps * eps
    if eps == 1.0:
        atanh_term = 0.0
    else:
        atanh_term = (1.0 - e2 * e2) * math.atanh(eps)
    value = e2 * (4.0 * li2(eps) - li2(e2)) + eps * e2 - eps + atanh_term
    return 2.0 * value / (math.pi ** 2 * e2)


def _chi1_integrand(s: float) -> float:
    """g(s)/s with g(s) = s + 1/s - (1/2)(s - 1/s)^2 log((1+s)/(1-s))."""
    if s < 0.05:
        s2 = s * s
        total = 8.0 / 3.0
        power = 1.0
        for m in range(1, 10):
            power *= s2
            total -= 8.0 * power / ((2 * m + 1) * (2 * m - 1) * (2 * m + 3))
        return total
    if s >= 1.0:
        return 2.0
    g = s + 1.0 / s - 0.5 * (s - 1.0 / s) ** 2 * 2.0 * math.atanh(s)
    return g / s


def chi1_integral(eps: float) -> float:
    """The rebit function as (4/pi^2) times the integral of g(s)/s over [0, eps]."""
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise DomainError(f"eps must lie in [0, 1], got {eps}")
    if eps == 0.0:
        return 0.0
    value, _ = quad(_chi1_integrand, 0.0, eps, epsabs=1e-14, epsrel=1e-13, limit=quadrature_config.limit)
    return 4.0 / math.pi ** 2 * value


def regularized_3f2_series(d: float, z: float, max_terms: int = None) -> float:
    """
    3F2~(-d/2, d/2, d; d/2 + 1, 3d/2 + 1; z), summed term by term.

    Stops when a term falls below 1e-16 of the partial sum or the series
    terminates (even d). Hitting max_terms with a last term above 1e-10
    relative raises QuadratureError.
    """
    max_terms = quadrature_config.series_max_terms if max_terms is None else max_terms
    a = (-0.5 * d, 0.5 * d, float(d))
    b = (0.5 * d + 1.0, 1.5 * d + 1.0)

    term = math.exp(-gammaln(b[0]) - gammaln(b[1]))
    total = term
    for n in range(max_terms):
        ratio = (a[0] + n) * (a[1] + n) * (a[2] + n) / ((b[0] + n) * (b[1] + n) * (n + 1)) * z
        term *= ratio
        total += term
        if term == 0.0 or abs(term) < SERIES_TOL * abs(total):
            return total

    if abs(term) > SERIES_ALARM * abs(total):
        raise QuadratureError(f"3F2 series for d={d}, z={z} did not converge in {max_terms} terms")
    logger.warning(f"3F2 series for d={d}, z={z} stopped at the {max_terms}-term cap")
    return total


def chi_series(d: float, eps: float) -> float:
    """General-d separability function from the regularized 3F2 series."""
    if d <= 0:
        raise DomainError(f"Dyson index must be positive, got {d}")
    eps = float(eps)
    if eps == 0.0:
        return 0.0
    log_prefactor = d * math.log(eps) + 3.0 * gammaln(d + 1.0) - 2.0 * gammaln(0.5 * d + 1.0)
    return math.exp(log_prefactor) * regularized_3f2_series(d, eps * eps)


_CLOSED_FORMS = {
    1: chi1,
    2: eta2,
    4: eta4,
}


def sep_function_rule(d: float, variant: str = None) -> Callable[[float], float]:
    if variant == "induced":
        if d != 2:
            raise DomainError("the induced variant is defined for d = 2 only")
        return chi21
    if variant == "series":
        return lambda e: chi_series(d, e)
    if variant is not None:
        raise DomainError(f"unknown separability-function variant '{variant}'")
    if d in _CLOSED_FORMS:
        return _CLOSED_FORMS[d]
    return lambda e: chi_series(d, e)


def sep_function(d: float, eps: ArrayLike, variant: str = None) -> ArrayLike:
    """
    Normalized separability function for Dyson index d at eps in [0, 1].

    Args:
        d: Dyson index; 1, 2 and 4 use closed forms, anything else the series
        eps: Singular-value ratio, scalar or array
        variant: None, 'series' (force the 3F2 series) or 'induced' (d = 2, k = 1)

    Returns:
        Function value(s), equal to 1 at eps = 1
    """
    arr = np.asarray(eps, dtype=np.float64)
    _check_eps(arr)
    rule = sep_function_rule(d, variant)
    if rule in (eta2, eta4, chi21):
        value = rule(arr)
    elif arr.ndim == 0:
        value = rule(float(arr))
    else:
        value = np.vectorize(rule, otypes=[np.float64])(arr)
    return float(value) if np.ndim(value) == 0 else value
