"""
Registry of verifiable quantities

Each target knows how to compute itself, the published value it is checked
against (None for informational rows) and the tolerance of that check.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Union

import numpy as np

from src.quantum.measures import (
    BURES, IDENTRIC, KUBO_MORI, MOROZOVA_CHENTSOV, MONOTONE_KINDS,
    WIGNER_YANASE, HILBERT_SCHMIDT, MeasureKind, induced,
)
from src.reference.integrals import (
    ExponentFamily, QuadratureResult, abs_sep_quadrature, eps_grid,
    hs_abs_constant, hs_abs_constant_condensed, max_deviation,
    qubit_volume_ratio, sep_prob_quadrature,
)
from src.reference.special import QuadratureError, chi1, chi1_integral, chi21, chi_series, eta2, eta4, li2

logger = logging.getLogger(__name__)

PI2 = math.pi ** 2

Computed = Union[float, QuadratureResult]


@dataclass(frozen=True)
class VerificationTarget:
    name: str
    description: str
    compute: Callable[[], float]
    expected: Optional[float] = None
    tolerance: float = 0.0
    relative: bool = False
    expect_divergent: bool = False


@dataclass(frozen=True)
class VerificationRow:
    quantity: str
    computed: float
    expected: Optional[float]
    abs_deviation: Optional[float]
    rel_deviation: Optional[float]
    passed: Optional[bool]
    description: str = ""

    @property
    def status(self) -> str:
        if self.passed is None:
            return "info"
        return "ok" if self.passed else "FAIL"


@lru_cache(maxsize=None)
def _conjecture(d: int, family: ExponentFamily) -> QuadratureResult:
    return sep_prob_quadrature(d, family)


@lru_cache(maxsize=None)
def _abs_sep(kind: MeasureKind) -> QuadratureResult:
    return abs_sep_quadrature(kind)


def _conjecture_target(d: int, family: ExponentFamily, part: str, expected, tolerance, description):
    name = f"d{d}-{family.value}-{part}"

    def compute():
        result = _conjecture(d, family)
        return getattr(result, part)

    return VerificationTarget(name, description, compute, expected, tolerance)


def _abs_target(kind: MeasureKind, expected: Optional[float], tolerance: float = 1e-3, description: str = ""):
    return VerificationTarget(
        name=f"abs-{kind.label.replace(':', '-')}",
        description=description or f"{kind} absolute-separability probability",
        compute=lambda: _abs_sep(kind).ratio,
        expected=expected,
        tolerance=tolerance,
        relative=True,
    )


def _volume_target(kind: MeasureKind, expected: Optional[float]):
    return VerificationTarget(
        name=f"volume-{kind.label}-bures",
        description=f"single-qubit volume {kind} / bures",
        compute=lambda: qubit_volume_ratio(kind, BURES).ratio,
        expected=expected,
        tolerance=1e-6,
    )


def _closed_vs_integral() -> float:
    return max_deviation(chi1, chi1_integral, eps_grid(99))


def _series_vs_closed(d: int, closed, grid) -> Callable[[], float]:
    return lambda: max_deviation(lambda e: chi_series(d, e), closed, grid)


def build_targets() -> Dict[str, VerificationTarget]:
    tenths = np.arange(1, 10) / 10.0
    targets: List[VerificationTarget] = [
        _conjecture_target(2, ExponentFamily.HS, "numerator", 2048 / 51975, 1e-9, "HS numerator, d=2"),
        _conjecture_target(2, ExponentFamily.HS, "denominator", 256 / 1575, 1e-9, "HS denominator, d=2"),
        _conjecture_target(2, ExponentFamily.HS, "ratio", 8 / 33, 1e-9, "HS separability probability, d=2"),
        _conjecture_target(2, ExponentFamily.SQRTX, "denominator", PI2 / 2, 1e-8, "sqrt(x) denominator, d=2"),
        _conjecture_target(2, ExponentFamily.SQRTX, "ratio", 1 - 256 / (27 * PI2), 1e-6,
                           "sqrt(x) separability probability, d=2"),
        _conjecture_target(2, ExponentFamily.ALT, "denominator", 4 / 3, 1e-10, "alternative denominator, d=2"),
        _conjecture_target(2, ExponentFamily.ALT, "ratio", (593 - 60 * PI2) / 9, 1e-6,
                           "alternative sqrt(x) probability, d=2"),
        _conjecture_target(1, ExponentFamily.HS, "ratio", 29 / 64, 1e-8, "HS rebit probability"),
        _conjecture_target(1, ExponentFamily.SQRTX, "ratio", 0.26223, 5e-5, "sqrt(x) rebit probability"),
        _conjecture_target(4, ExponentFamily.ALT, "ratio", 0.014015, 1e-4, "alternative quaterbit probability"),
        _conjecture_target(4, ExponentFamily.HS, "ratio", None, 0.0, "HS quaterbit probability"),
        VerificationTarget(
            name="d4-sqrtx-denominator",
            description="sqrt(x) quaterbit denominator",
            compute=lambda: _conjecture(4, ExponentFamily.SQRTX).denominator,
            expect_divergent=True,
        ),
        VerificationTarget("li2-one", "Li2(1) = pi^2/6", lambda: li2(1.0), PI2 / 6, 1e-14),
        VerificationTarget("li2-minus-one", "Li2(-1) = -pi^2/12", lambda: li2(-1.0), -PI2 / 12, 1e-14),
        VerificationTarget("chi1-closed-vs-integral", "rebit closed form vs integral, 99 points",
                           _closed_vs_integral, 0.0, 1e-10),
        VerificationTarget("chi1-series-vs-closed", "3F2 series vs rebit closed form",
                           _series_vs_closed(1, chi1, tenths), 0.0, 1e-8),
        VerificationTarget("chi2-series-vs-closed", "3F2 series vs qubit polynomial",
                           _series_vs_closed(2, eta2, tenths), 0.0, 1e-12),
        VerificationTarget("chi4-series-vs-eta4", "3F2 series vs quaterbit polynomial",
                           _series_vs_closed(4, eta4, tenths)),
        VerificationTarget("chi21-normalization", "induced qubit function at eps = 1",
                           lambda: chi21(1.0), 1.0, 1e-12),
        VerificationTarget("hs-abs", "HS absolute-separability constant", hs_abs_constant, 0.00365826, 1e-8),
        VerificationTarget("hs-abs-forms", "two arrangements of the HS constant",
                           lambda: abs(hs_abs_constant() - hs_abs_constant_condensed()), 0.0, 1e-12),
        VerificationTarget("abs-hs", "HS absolute separability by simplex quadrature",
                           lambda: _abs_sep(HILBERT_SCHMIDT).ratio, hs_abs_constant(), 1e-6, relative=True),
        _abs_target(KUBO_MORI, 5.04898e-6),
        _abs_target(WIGNER_YANASE, 3.42309e-5),
        _abs_target(IDENTRIC, 7.62634e-5),
        _abs_target(BURES, 1.61792e-4, tolerance=1e-2),
    ]

    for k, expected in enumerate((0.0232545, 0.071067, 0.1499309, 0.252828), start=1):
        targets.append(_abs_target(induced(k), expected))

    volumes = {
        KUBO_MORI.name: 2.0,
        WIGNER_YANASE.name: 4.0 * (math.pi - 2.0) / math.pi,
        MOROZOVA_CHENTSOV.name: PI2 / 2.0,
    }
    for kind in MONOTONE_KINDS:
        if kind.finite_volume and kind != BURES:
            targets.append(_volume_target(kind, volumes.get(kind.name)))

    return {t.name: t for t in targets}


TARGETS = build_targets()


def evaluate(target: VerificationTarget) -> VerificationRow:
    """Compute one target and compare it with its published value."""
    try:
        computed = float(target.compute())
    except QuadratureError as e:
        raise QuadratureError(f"{target.name}: {e}") from e

    if target.expect_divergent:
        passed = math.isinf(computed)
        return VerificationRow(target.name, computed, math.inf, None, None, passed, target.description)

    if target.expected is None:
        return VerificationRow(target.name, computed, None, None, None, None, target.description)

    abs_dev = abs(computed - target.expected)
    rel_dev = abs_dev / abs(target.expected) if target.expected != 0.0 else None
    deviation = rel_dev if target.relative else abs_dev
    passed = deviation is not None and deviation <= target.tolerance
    if not passed:
        logger.warning(
            f"{target.name}: computed {computed:.12g}, expected {target.expected:.12g} "
            f"(deviation {deviation} > {target.tolerance:g})"
        )
    return VerificationRow(target.name, computed, target.expected, abs_dev, rel_dev, passed, target.description)


def resolve(names: List[str]) -> List[VerificationTarget]:
    unknown = [n for n in names if n not in TARGETS]
    if unknown:
        raise KeyError(f"unknown quantities: {', '.join(unknown)}")
    return [TARGETS[n] for n in names]
