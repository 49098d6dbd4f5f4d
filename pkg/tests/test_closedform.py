"""
Tests for the explicit solution families and the recurrences behind them.
"""

from fractions import Fraction

import pytest

from qvariant.analysis.closedform import (
    PERMUTATIONS,
    PochhammerSeries,
    conj3_series,
    g1_series,
    g2_series,
    g3_series,
    hahn_series,
    newton_coefficients,
    phi21,
    phi21_coeffs,
    pochhammer_residual,
    recurrence_check_thm2,
    recurrence_check_thm3,
    recurrence_residual_thm2,
    recurrence_residual_thm3,
    residual_report,
    residual_term_scale,
    verify_conjecture,
)
from qvariant.analysis.errors import (
    InvalidParameterError,
    NodeCoincidenceError,
    VanishingDenominatorError,
)
from qvariant.analysis.frobenius import local_series_infinity, residual_coefficients
from qvariant.analysis.qcore import HalfInt, QContext
from qvariant.analysis.qdiff import Params2, Params3, Poly, make_qhypergeometric, make_variant_deg2


@pytest.fixture
def ctx():
    return QContext.exact(Fraction(1, 2))


@pytest.fixture
def p2(ctx):
    return Params2.create(ctx, h1=1, h2=0, l1=0, l2=0, alpha1=0, alpha2=1, t1=1, t2=2)


@pytest.fixture
def p3(ctx):
    return Params3.create(ctx, h1=1, h2=0, h3=0, l1=0, l2=0, l3=0, alpha=0, t1=1, t2=2, t3=3)


class TestQHypergeometricSolutions:
    """Tests for 2phi1 and the Hahn 3phi2 solution."""

    def test_phi21_coeffs(self, ctx):
        """(1/2;q)_1 (1/8;q)_1 / ((1/16;q)_1 (q;q)_1) = 28/45."""
        coeffs = phi21_coeffs(ctx, Fraction(1, 2), Fraction(1, 8), Fraction(1, 16), 1)
        assert coeffs == [1, Fraction(28, 45)]

    def test_phi21_value(self, ctx):
        a, b, c, x = Fraction(1, 2), Fraction(1, 8), Fraction(1, 16), Fraction(1, 3)
        coeffs = phi21_coeffs(ctx, a, b, c, 4)
        assert phi21(ctx, a, b, c, x, 4) == sum(cn * x**n for n, cn in enumerate(coeffs))

    def test_phi21_vanishing_denominator(self, ctx):
        """c = q^{-1} makes (c;q)_2 vanish."""
        with pytest.raises(VanishingDenominatorError):
            phi21_coeffs(ctx, Fraction(1, 2), Fraction(1, 8), Fraction(4), 3)

    @pytest.mark.parametrize("N", [3, 6])
    def test_hahn_residual_is_boundary_only(self, ctx, N):
        a, b, c = Fraction(2, 3), Fraction(3, 5), Fraction(5, 7)
        eq = make_qhypergeometric(ctx, a, b, c)
        report = residual_report(eq, hahn_series(ctx, a, b, c, N), N - 1)
        assert report.passed
        assert set(report.support) <= {N, N + 1}

    def test_hahn_node(self, ctx):
        series = hahn_series(ctx, Fraction(2, 3), Fraction(3, 5), Fraction(5, 7), 2)
        assert series.node == Fraction(5, 7) / (Fraction(2, 3) * Fraction(3, 5))
        assert series.orientation == "ascending"


class TestVariantDeg2Solutions:
    """Tests for g1, g2 and g3."""

    @pytest.mark.parametrize("i", [1, 2])
    @pytest.mark.parametrize("N", [2, 5])
    def test_g2_residual(self, ctx, p2, i, N):
        report = residual_report(make_variant_deg2(ctx, p2), g2_series(ctx, p2, i, N), N - 1)
        assert report.passed
        assert set(report.support) <= {N, N + 1, N + 2}

    @pytest.mark.parametrize("i", [1, 2])
    def test_g3_residual(self, ctx, p2, i):
        N = 5
        report = residual_report(make_variant_deg2(ctx, p2), g3_series(ctx, p2, i, N), N - 1)
        assert report.passed
        assert set(report.support) <= {N, N + 1, N + 2}

    def test_g3_descending_shape(self, ctx, p2):
        series = g3_series(ctx, p2, 1, 3)
        assert series.orientation == "descending"
        assert series.prefactor_exponent == HalfInt(0)
        # q^{h1+1/2} t1
        assert series.node == Fraction(1, 8)

    def test_g1_matches_frobenius(self, ctx, p2):
        """With alpha1 = 1, alpha2 = 0 the exponent alpha1 is non-resonant."""
        params = p2.swapped_alphas()
        g1 = g1_series(ctx, params, 6)
        assert g1.coeffs[1] == Fraction(7, 6)
        eq = make_variant_deg2(ctx, params)
        assert g1.coeffs == local_series_infinity(eq, HalfInt(2), 6).coeffs
        assert all(r == 0 for r in residual_coefficients(eq, g1)[:7])

    def test_g1_resonant_denominator(self, ctx, p2):
        """alpha2 - alpha1 = 1 makes (q^{alpha1-alpha2+1};q)_n vanish."""
        with pytest.raises(VanishingDenominatorError):
            g1_series(ctx, p2, 3)

    def test_invalid_index(self, ctx, p2):
        with pytest.raises(InvalidParameterError):
            g2_series(ctx, p2, 3, 2)

    def test_g2_terminates(self, ctx):
        """lambda = 0, alpha1 = -2: (q^{-2};q)_n = 0 for n >= 3, so g2 is a polynomial solution."""
        params = Params2.create(ctx, h1=1, h2=0, l1=0, l2=0, alpha1=-2, alpha2=4, t1=1, t2=2)
        assert params.lam == HalfInt(0)
        series = g2_series(ctx, params, 1, 5)
        assert series.coeffs[2] != 0
        assert all(c == 0 for c in series.coeffs[3:])
        residual = pochhammer_residual(make_variant_deg2(ctx, params), series)
        assert all(r == 0 for r in residual)


class TestRecurrences:
    """Tests for the recurrences used in the proofs."""

    @pytest.mark.parametrize("i", [1, 2])
    def test_six_term_recurrence(self, ctx, p2, i):
        for n in range(6):
            assert recurrence_residual_thm2(ctx, p2, n, i) == 0

    @pytest.mark.parametrize("i", [1, 2])
    def test_double_recurrence(self, ctx, p2, i):
        for n in range(4):
            for k in range(n + 1):
                assert recurrence_residual_thm3(ctx, p2, n, k, i) == 0


class TestConjecture:
    """Tests for the two solution families of the degree-3 variant."""

    @pytest.mark.parametrize("family", ["I", "II"])
    @pytest.mark.parametrize("perm", PERMUTATIONS)
    def test_interior_residual_vanishes(self, ctx, p3, family, perm):
        report = verify_conjecture(ctx, p3, family, perm, 5)
        assert report.passed
        assert report.orders_checked == 3

    def test_first_coefficients(self, ctx, p3):
        """Family I with identity permutation: a_1 = 0 at these parameters."""
        series = conj3_series(ctx, p3, "I", (1, 2, 3), 2)
        assert series.coeffs[0] == 1
        assert series.coeffs[1] == 0
        assert series.node == 2
        assert series.prefactor_exponent == HalfInt(2)

    def test_small_truncation_rejected(self, ctx, p3):
        with pytest.raises(InvalidParameterError):
            verify_conjecture(ctx, p3, "I", (1, 2, 3), 4)

    def test_node_coincidence(self, ctx):
        """q^{l_i-1/2} t_i equal for i = 1, 2."""
        p3 = Params3.create(ctx, h1=1, h2=0, h3=0, l1=0, l2=1, l3=0, alpha="1/2", t1=1, t2=4, t3=3)
        with pytest.raises(NodeCoincidenceError):
            verify_conjecture(ctx, p3, "I", (1, 2, 3), 5)

    def test_bad_permutation(self, ctx, p3):
        with pytest.raises(InvalidParameterError):
            conj3_series(ctx, p3, "I", (1, 1, 2), 3)


class TestFloatResiduals:
    """Float-mode residuals are judged against the terms summed into each order."""

    @pytest.fixture
    def fctx(self):
        return QContext.floating(0.7)

    @pytest.fixture
    def fp2(self, fctx):
        return Params2.create(fctx, h1=1, h2=0, l1=0, l2=0, alpha1=0, alpha2=1, t1=1, t2=2)

    @pytest.mark.parametrize("i", [1, 2])
    def test_g2_and_g3_pass(self, fctx, fp2, i):
        N = 8
        eq = make_variant_deg2(fctx, fp2)
        for builder in (g2_series, g3_series):
            report = residual_report(eq, builder(fctx, fp2, i, N), N - 1)
            assert report.passed, builder.__name__
            assert set(report.support) <= {N, N + 1, N + 2}

    def test_hahn_passes(self, fctx):
        a, b, c = (complex(v) for v in (2 / 3, 3 / 5, 5 / 7))
        N = 8
        eq = make_qhypergeometric(fctx, a, b, c)
        report = residual_report(eq, hahn_series(fctx, a, b, c, N), N - 1)
        assert report.passed

    def test_scale_bounds_every_order(self, fctx, fp2):
        eq = make_variant_deg2(fctx, fp2)
        series = g2_series(fctx, fp2, 1, 6)
        residual = pochhammer_residual(eq, series)
        scale = residual_term_scale(eq, series)
        assert len(scale) == len(residual)
        assert all(abs(r) <= s * (1 + 1e-9) for r, s in zip(residual, scale))
        # 边界阶的残差是真实的，不被容差吞掉
        assert any(abs(r) > 1e-8 * s for r, s in zip(residual[6:], scale[6:]))

    def test_recurrence_checks(self, fctx, fp2):
        for n in range(6):
            value, scale = recurrence_check_thm2(fctx, fp2, n, 1)
            assert fctx.is_zero(value, scale)
        for n in range(4):
            for k in range(n + 1):
                value, scale = recurrence_check_thm3(fctx, fp2, n, k, 1)
                assert fctx.is_zero(value, scale)


class TestNewtonBasis:
    """Tests for re-expansion in the Pochhammer basis."""

    def test_round_trip(self, ctx):
        poly = Poly((Fraction(1), Fraction(-2), Fraction(3), Fraction(1, 5)))
        node = Fraction(3, 2)
        coeffs = newton_coefficients(ctx, poly, node)
        series = PochhammerSeries(HalfInt(0), node, "ascending", tuple(coeffs))
        for x in (Fraction(1, 3), Fraction(2), Fraction(-5, 7)):
            assert series.partial_sum(ctx, x) == poly(x)
