"""
Eigenvalue weights of the Hilbert-Schmidt, induced and operator-monotone measures

Monotone measures are indexed by a normalized symmetric operator monotone f
(f(1) = 1, f(x) = x f(1/x)). On 4x4 spectra sorted descending the weight is

    prod_{i<j} (l_i - l_j)^2 * (l1 l2 l3 l4)^(-7/2) * l1^3 l2^2 l3 / prod_{i<j} f(l_i / l_j)

which equals det^(-1/2) prod_{i<j} (l_i - l_j)^2 c_f(l_i, l_j) with
c_f(x, y) = 1 / (y f(x/y)), so it is symmetric in the eigenvalues.

All weights are returned as logs. A zero eigenvalue under a monotone measure
is a +inf divergence and is flagged non-finite; a tie under any measure is
log 0 = -inf, a finite zero weight.
"""

import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from src.errors import DomainError

logger = logging.getLogger(__name__)

SERIES_RADIUS = 1e-4

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class MeasureKind:
    name: str
    k: int = 0

    @property
    def is_monotone(self) -> bool:
        return self.name in _MONOTONE_FUNCTIONS

    @property
    def finite_volume(self) -> bool:
        return self.name not in INFINITE_VOLUME

    @property
    def label(self) -> str:
        return f"induced:{self.k}" if self.name == "induced" else self.name

    @classmethod
    def parse(cls, text: str) -> "MeasureKind":
        """Parse a CLI-facing measure name such as 'bures' or 'induced:2'."""
        text = text.strip().lower()
        if text.startswith("induced"):
            _, _, k = text.partition(":")
            if not k.isdigit():
                raise DomainError(f"induced measure needs a nonnegative integer k, got '{text}'")
            return induced(int(k))
        if text == HILBERT_SCHMIDT.name or text in _MONOTONE_FUNCTIONS:
            return cls(text)
        raise DomainError(f"unknown measure '{text}'")

    def __str__(self) -> str:
        return self.label


def induced(k: int) -> MeasureKind:
    if k < 0:
        raise DomainError(f"induced measure parameter must be >= 0, got {k}")
    return MeasureKind("induced", int(k))


@dataclass(frozen=True)
class LogWeight:
    log_value: ArrayLike
    finite: ArrayLike


def _kubo_mori(x: np.ndarray) -> np.ndarray:
    t = x - 1.0
    near = np.abs(t) < SERIES_RADIUS
    safe_t = np.where(near, 1.0, t)
    safe_x = np.where(near, 2.0, x)
    direct = safe_t / np.log(safe_x)
    series = 1.0 + t * (0.5 + t * (-1.0 / 12.0 + t * (1.0 / 24.0 - t * 19.0 / 720.0)))
    return np.where(near, series, direct)


def _bures(x):
    return 0.5 * (x + 1.0)


def _maximal(x):
    return 2.0 * x / (x + 1.0)


def _geometric(x):
    return np.sqrt(x)


def _wigner_yanase(x):
    return 0.25 * (np.sqrt(x) + 1.0) ** 2


def _log_geometric(x):
    return np.sqrt(x) * 2.0 / (x + 1.0) * _kubo_mori(x)


def _arith_minmax(x):
    return (x * x + 6.0 * x + 1.0) / (4.0 * x + 4.0)


def _morozova_chentsov(x):
    return 2.0 / (x + 1.0) * _kubo_mori(x) ** 2


def _identric(x):
    # x^(x/(x-1)) / e, written so large x cannot overflow
    return np.exp(x / _kubo_mori(x) - 1.0)


_MONOTONE_FUNCTIONS = {
    "bures": _bures,
    "maximal": _maximal,
    "kubo-mori": _kubo_mori,
    "geometric": _geometric,
    "wigner-yanase": _wigner_yanase,
    "log-geometric": _log_geometric,
    "arith-minmax": _arith_minmax,
    "morozova-chentsov": _morozova_chentsov,
    "identric": _identric,
}

INFINITE_VOLUME = frozenset({"maximal", "geometric", "log-geometric"})

HILBERT_SCHMIDT = MeasureKind("hs")
BURES = MeasureKind("bures")
MAXIMAL = MeasureKind("maximal")
KUBO_MORI = MeasureKind("kubo-mori")
GEOMETRIC = MeasureKind("geometric")
WIGNER_YANASE = MeasureKind("wigner-yanase")
LOG_GEOMETRIC = MeasureKind("log-geometric")
ARITH_MINMAX = MeasureKind("arith-minmax")
MOROZOVA_CHENTSOV = MeasureKind("morozova-chentsov")
IDENTRIC = MeasureKind("identric")

MONOTONE_KINDS: Tuple[MeasureKind, ...] = tuple(MeasureKind(name) for name in _MONOTONE_FUNCTIONS)
STUDIED_KINDS: Tuple[MeasureKind, ...] = (HILBERT_SCHMIDT,) + MONOTONE_KINDS

_PAIRS = tuple((i, j) for i in range(4) for j in range(i + 1, 4))
_ASYMMETRIC_POWERS = np.array([3.0, 2.0, 1.0, 0.0])


def _require_monotone(kind: MeasureKind) -> None:
    if not kind.is_monotone:
        raise DomainError(f"{kind} is not an operator-monotone measure")


def f_eval(kind: MeasureKind, x: ArrayLike) -> ArrayLike:
    """The normalized operator monotone function of a monotone measure."""
    _require_monotone(kind)
    arr = np.asarray(x, dtype=np.float64)
    if np.any(~(arr > 0.0)):
        raise DomainError("f is defined for x > 0 only")
    value = _MONOTONE_FUNCTIONS[kind.name](arr)
    return float(value) if np.ndim(value) == 0 else value


def _log_f(kind: MeasureKind, x: np.ndarray) -> np.ndarray:
    return np.log(_MONOTONE_FUNCTIONS[kind.name](x))


def _finite_flag(log_value: np.ndarray) -> np.ndarray:
    return ~(np.isposinf(log_value) | np.isnan(log_value))


def _pack(log_value: np.ndarray) -> LogWeight:
    finite = _finite_flag(log_value)
    if np.ndim(log_value) == 0:
        return LogWeight(log_value=float(log_value), finite=bool(finite))
    return LogWeight(log_value=log_value, finite=finite)


def log_vandermonde_sq(lam: np.ndarray) -> np.ndarray:
    """log prod_{i<j} (l_i - l_j)^2 for descending-sorted spectra."""
    total = np.zeros(lam.shape[:-1])
    with np.errstate(divide="ignore"):
        for i, j in _PAIRS:
            total = total + 2.0 * np.log(np.abs(lam[..., i] - lam[..., j]))
    return total


def eig_weight_log_values(kind: MeasureKind, spectrum: np.ndarray) -> np.ndarray:
    """Raw log-weights for one spectrum (4,) or a batch (N, 4)."""
    lam = -np.sort(-np.asarray(spectrum, dtype=np.float64), axis=-1)
    log_vdm = log_vandermonde_sq(lam)

    if kind.name == HILBERT_SCHMIDT.name:
        return log_vdm

    positive = np.asarray(np.all(lam > 0.0, axis=-1))
    safe = np.where(positive[..., None], lam, 1.0)
    log_lam = np.log(safe)

    if kind.name == "induced":
        if kind.k == 0:
            return log_vdm
        log_det = np.where(positive, log_lam.sum(axis=-1), -np.inf)
        return kind.k * log_det + log_vdm

    _require_monotone(kind)
    value = log_vdm - 3.5 * log_lam.sum(axis=-1) + log_lam @ _ASYMMETRIC_POWERS
    for i, j in _PAIRS:
        value = value - _log_f(kind, safe[..., i] / safe[..., j])
    return np.where(positive, value, np.inf)


def eig_weight_log(kind: MeasureKind, spectrum: np.ndarray) -> LogWeight:
    return _pack(eig_weight_log_values(kind, spectrum))


def qubit_eig_weight_log(kind: MeasureKind, lam: ArrayLike) -> LogWeight:
    """Single-qubit monotone weight (l1 - l2)^2 / (sqrt(l1 l2) * l2 f(l1/l2)), l1 = lam."""
    _require_monotone(kind)
    l1 = np.asarray(lam, dtype=np.float64)
    l2 = 1.0 - l1
    interior = (l1 > 0.0) & (l2 > 0.0)
    s1 = np.where(interior, l1, 0.5)
    s2 = np.where(interior, l2, 0.5)
    with np.errstate(divide="ignore"):
        value = (
            2.0 * np.log(np.abs(s1 - s2))
            - 0.5 * np.log(s1 * s2)
            - np.log(s2)
            - _log_f(kind, s1 / s2)
        )
    return _pack(np.where(interior, value, np.inf))
