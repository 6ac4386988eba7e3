"""
Tests for closed forms, conjecture quadratures and reference constants.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import spence

from src.errors import DomainError
from src.quantum.measures import (
    BURES, GEOMETRIC, HILBERT_SCHMIDT, IDENTRIC, KUBO_MORI, MAXIMAL,
    MOROZOVA_CHENTSOV, WIGNER_YANASE, induced,
)
from src.reference.integrals import (
    ExponentFamily, abs_sep_quadrature, eps_grid, hs_abs_constant,
    hs_abs_constant_condensed, qubit_volume_ratio, sep_prob_quadrature,
    truncated_denominator,
)
from src.reference.special import (
    SMALL_EPS, QuadratureError, chi1, chi1_integral, chi21, chi_series, li2,
    regularized_3f2_series, sep_function,
)
from src.reference.targets import TARGETS, evaluate, resolve

PI2 = math.pi ** 2


class TestDilogarithm:
    """Test the real dilogarithm."""

    def test_basel(self):
        assert li2(1.0) == pytest.approx(PI2 / 6, abs=1e-14)

    def test_zero(self):
        assert li2(0.0) == 0.0

    def test_minus_one(self):
        assert li2(-1.0) == pytest.approx(-PI2 / 12, abs=1e-14)

    def test_half(self):
        assert li2(0.5) == pytest.approx(PI2 / 12 - 0.5 * math.log(2) ** 2, abs=1e-14)

    @settings(max_examples=200, deadline=None)
    @given(z=st.floats(min_value=-50.0, max_value=1.0))
    def test_matches_spence(self, z):
        assert li2(z) == pytest.approx(float(spence(1.0 - z)), abs=1e-13, rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            li2(1.5)


class TestSeparabilityFunctions:
    """Test the normalized separability functions."""

    def test_qubit_values(self):
        assert sep_function(2, 1.0) == pytest.approx(1.0)
        assert sep_function(2, 0.5) == pytest.approx(0.3125)

    @pytest.mark.parametrize("d", [1, 2, 4])
    def test_normalized(self, d):
        assert sep_function(d, 1.0) == pytest.approx(1.0, abs=1e-12)
        assert sep_function(d, 0.0) == 0.0

    @pytest.mark.parametrize("d", [1, 2, 4])
    def test_series_normalized(self, d):
        assert chi_series(d, 1.0) == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("d", [1, 2, 4])
    def test_strictly_increasing(self, d):
        values = sep_function(d, np.linspace(0.0, 1.0, 201))
        assert np.all(np.diff(values) > 0.0)

    def test_rebit_closed_form_matches_integral(self):
        for eps in eps_grid(99):
            assert chi1(eps) == pytest.approx(chi1_integral(eps), abs=1e-10)

    @pytest.mark.parametrize("eps", [1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 3e-4, 7e-4, 9.99e-4, 1e-3, 1.001e-3])
    def test_rebit_small_argument_matches_integral(self, eps):
        assert chi1(eps) == pytest.approx(chi1_integral(eps), abs=1e-10)

    def test_rebit_continuous_at_series_switch(self):
        below = chi1(SMALL_EPS * (1.0 - 1e-9))
        assert below == pytest.approx(chi1(SMALL_EPS), abs=1e-10)
        assert below == pytest.approx(chi1(SMALL_EPS * (1.0 + 1e-9)), abs=1e-10)

    def test_rebit_small_argument_slope(self):
        assert chi1(1e-8) / 1e-8 == pytest.approx(32.0 / (3.0 * PI2), rel=1e-12)

    def test_series_matches_closed_forms(self):
        for eps in np.arange(1, 10) / 10.0:
            assert chi_series(1, eps) == pytest.approx(chi1(eps), abs=1e-8)
            assert chi_series(2, eps) == pytest.approx(sep_function(2, eps), abs=1e-12)

    def test_quaterbit_series_agrees_with_polynomial(self):
        eps = np.arange(1, 10) / 10.0
        deviation = max(abs(chi_series(4, e) - sep_function(4, e)) for e in eps)
        assert deviation < 1e-12

    def test_induced_variant(self):
        assert chi21(1.0) == pytest.approx(1.0)
        assert chi21(0.5) == pytest.approx(0.47265625)
        assert sep_function(2, 0.5, variant="induced") == pytest.approx(0.47265625)

    def test_general_d_through_series(self):
        value = sep_function(3, 0.5)
        assert value == pytest.approx(chi_series(3, 0.5))
        assert 0.0 < value < 1.0

    def test_domain(self):
        with pytest.raises(DomainError):
            sep_function(2, 1.2)
        with pytest.raises(DomainError):
            sep_function(4, 0.5, variant="induced")

    def test_series_cap_alarm(self):
        with pytest.raises(QuadratureError):
            regularized_3f2_series(1, 0.99, max_terms=3)


class TestConjectureQuadratures:
    """Test the double integrals of the conjectured probabilities."""

    def test_hilbert_schmidt_qubit(self):
        result = sep_prob_quadrature(2, ExponentFamily.HS)
        assert result.numerator == pytest.approx(2048 / 51975, abs=1e-9)
        assert result.denominator == pytest.approx(256 / 1575, abs=1e-9)
        assert result.ratio == pytest.approx(8 / 33, abs=1e-9)

    def test_sqrtx_qubit(self):
        result = sep_prob_quadrature(2, ExponentFamily.SQRTX)
        assert result.denominator == pytest.approx(PI2 / 2, abs=1e-8)
        assert result.ratio == pytest.approx(1 - 256 / (27 * PI2), abs=1e-6)

    def test_alternative_qubit(self):
        result = sep_prob_quadrature(2, ExponentFamily.ALT)
        assert result.denominator == pytest.approx(4 / 3, abs=1e-10)
        assert result.ratio == pytest.approx((593 - 60 * PI2) / 9, abs=1e-6)

    def test_quaterbit_sqrtx_diverges(self):
        result = sep_prob_quadrature(4, ExponentFamily.SQRTX)
        assert result.divergent
        assert math.isinf(result.denominator)

    def test_truncated_denominator_grows(self):
        values = [truncated_denominator(4, ExponentFamily.SQRTX, delta) for delta in (1e-2, 1e-3, 1e-4)]
        assert values[0] < values[1] < values[2]
        assert values[2] - values[1] > 0.5 * (values[1] - values[0])

    def test_unsupported_d(self):
        with pytest.raises(DomainError):
            sep_prob_quadrature(3, ExponentFamily.HS)

    @pytest.mark.slow
    def test_rebit(self):
        assert sep_prob_quadrature(1, ExponentFamily.HS).ratio == pytest.approx(29 / 64, abs=1e-8)
        assert sep_prob_quadrature(1, ExponentFamily.SQRTX).ratio == pytest.approx(0.26223, abs=5e-5)

    @pytest.mark.slow
    def test_quaterbit_alternative(self):
        assert sep_prob_quadrature(4, ExponentFamily.ALT).ratio == pytest.approx(0.014015, abs=1e-4)


class TestAbsoluteSeparability:
    """Test the absolute-separability constants."""

    def test_closed_form(self):
        assert hs_abs_constant() == pytest.approx(0.00365826, abs=1e-8)

    def test_two_arrangements_agree(self):
        assert abs(hs_abs_constant() - hs_abs_constant_condensed()) < 1e-12

    def test_below_separable_probability(self):
        assert 0.0 < hs_abs_constant() < 8 / 33

    @pytest.mark.parametrize("kind", [MAXIMAL, GEOMETRIC], ids=str)
    def test_infinite_volume_diverges(self, kind):
        assert abs_sep_quadrature(kind).divergent

    @pytest.mark.slow
    def test_hilbert_schmidt_quadrature(self):
        assert abs_sep_quadrature(HILBERT_SCHMIDT).ratio == pytest.approx(hs_abs_constant(), rel=1e-6)

    @pytest.mark.slow
    @pytest.mark.parametrize("kind, expected, rel", [
        (KUBO_MORI, 5.04898e-6, 1e-3),
        (WIGNER_YANASE, 3.42309e-5, 1e-3),
        (IDENTRIC, 7.62634e-5, 1e-3),
        (BURES, 1.61792e-4, 1e-2),
        (induced(1), 0.0232545, 1e-3),
        (induced(2), 0.071067, 1e-3),
        (induced(3), 0.1499309, 1e-3),
        (induced(4), 0.252828, 1e-3),
    ], ids=str)
    def test_measure_quadratures(self, kind, expected, rel):
        assert abs_sep_quadrature(kind).ratio == pytest.approx(expected, rel=rel)


class TestQubitVolumes:
    """Test single-qubit volume ratios."""

    @pytest.mark.parametrize("kind, expected", [
        (KUBO_MORI, 2.0),
        (WIGNER_YANASE, 4 * (math.pi - 2) / math.pi),
        (MOROZOVA_CHENTSOV, PI2 / 2),
    ], ids=str)
    def test_ratio_to_bures(self, kind, expected):
        assert qubit_volume_ratio(kind, BURES).ratio == pytest.approx(expected, abs=1e-6)

    def test_divergent_kind(self):
        assert qubit_volume_ratio(MAXIMAL, BURES).divergent

    def test_requires_monotone(self):
        with pytest.raises(DomainError):
            qubit_volume_ratio(HILBERT_SCHMIDT, BURES)


class TestTargets:
    """Test the verification registry."""

    def test_cheap_rows_pass(self):
        for name in ("li2-one", "li2-minus-one", "chi21-normalization", "hs-abs", "hs-abs-forms",
                     "chi2-series-vs-closed", "chi1-series-vs-closed"):
            row = evaluate(TARGETS[name])
            assert row.passed, name

    def test_divergent_row(self):
        row = evaluate(TARGETS["d4-sqrtx-denominator"])
        assert row.passed
        assert math.isinf(row.computed)

    def test_informational_row(self):
        row = evaluate(TARGETS["chi4-series-vs-eta4"])
        assert row.passed is None
        assert row.status == "info"

    def test_resolve_unknown(self):
        with pytest.raises(KeyError):
            resolve(["no-such-quantity"])

    def test_quadrature_error_names_target(self, monkeypatch):
        def fail():
            raise QuadratureError("did not settle")

        target = TARGETS["li2-one"]
        monkeypatch.setitem(TARGETS, "li2-one", type(target)(target.name, target.description, fail))
        with pytest.raises(QuadratureError, match="li2-one"):
            evaluate(TARGETS["li2-one"])
