"""
Tests for the three-term q-difference operator and the named equations.
"""

import json
from fractions import Fraction
from pathlib import Path

import pytest

from qvariant.analysis.closedform import g2_series
from qvariant.analysis.codec import series_from_json, series_to_json
from qvariant.analysis.errors import InvalidParameterError
from qvariant.analysis.frobenius import local_series_zero
from qvariant.analysis.qcore import HalfInt, QContext
from qvariant.analysis.qdiff import (
    Params2,
    Params3,
    Poly,
    apply,
    gauge_power,
    make_qheun,
    make_qhypergeometric,
    make_variant_deg2,
    make_variant_deg3,
    variant_deg2_energy,
)
from qvariant.analysis.sampling import draw_params2, draw_params3, rng_for

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def ctx():
    return QContext.exact(Fraction(1, 2))


@pytest.fixture
def p2(ctx):
    """lambda = 1/2"""
    return Params2.create(ctx, h1=1, h2=0, l1=0, l2=0, alpha1=0, alpha2=1, t1=1, t2=2)


class TestPoly:
    """Tests for Poly."""

    def test_trailing_zeros_trimmed(self):
        assert Poly((1, 2, 0, 0)).coeffs == (1, 2)
        assert Poly((0,)).degree() == -1

    def test_from_roots(self):
        poly = Poly.from_roots([Fraction(1), Fraction(2)], lead=Fraction(3))
        assert poly.coeffs == (6, -9, 3)
        assert poly(1) == 0 and poly(2) == 0

    def test_dilate_and_reflect(self):
        poly = Poly((Fraction(1), Fraction(2), Fraction(3)))
        assert poly.dilate(Fraction(2)).coeffs == (1, 4, 12)
        assert poly.reflected(2).coeffs == (3, 2, 1)
        assert poly.reflected(3).coeffs == (0, 3, 2, 1)

    def test_arithmetic(self):
        a, b = Poly((1, 1)), Poly((-1, 1))
        assert (a * b).coeffs == (-1, 0, 1)
        assert (a - a).coeffs == ()
        assert (2 * a).coeffs == (2, 2)


class TestQHypergeometric:
    """Tests for make_qhypergeometric."""

    def test_coefficients(self, ctx):
        a, b, c = Fraction(1, 2), Fraction(1, 8), Fraction(1, 16)
        eq = make_qhypergeometric(ctx, a, b, c)
        assert eq.u.coeffs == (-Fraction(1, 4), 1)
        assert eq.v.coeffs == (Fraction(1, 4) + c, -(a + b))
        assert eq.w.coeffs == (-c, a * b)
        assert eq.name == "qhyp"

    def test_constant_image(self, ctx):
        """The operator sends 1 to (1-a)(1-b) x."""
        a, b, c = Fraction(2, 3), Fraction(3, 5), Fraction(5, 7)
        eq = make_qhypergeometric(ctx, a, b, c)
        assert eq.apply_poly(Poly((Fraction(1),))) == Poly((0, (1 - a) * (1 - b)))

    def test_zero_parameter_rejected(self, ctx):
        with pytest.raises(InvalidParameterError):
            make_qhypergeometric(ctx, Fraction(0), Fraction(1, 2), Fraction(1, 3))

    def test_reflect_is_involution(self, ctx):
        eq = make_qhypergeometric(ctx, Fraction(2, 3), Fraction(3, 5), Fraction(5, 7))
        assert eq.reflect().reflect().same_as(eq)

    def test_apply_matches_apply_poly(self, ctx):
        eq = make_qhypergeometric(ctx, Fraction(2, 3), Fraction(3, 5), Fraction(5, 7))
        f = Poly((Fraction(1), Fraction(-2), Fraction(1, 3)))
        x = Fraction(3, 7)
        assert apply(eq, f, x) == eq.apply_poly(f)(x)
        with pytest.raises(InvalidParameterError):
            apply(eq, f, Fraction(0))

    def test_gauge_round_trip(self, ctx):
        eq = make_qhypergeometric(ctx, Fraction(2, 3), Fraction(3, 5), Fraction(5, 7))
        assert gauge_power(gauge_power(eq, HalfInt(3)), HalfInt(-3)).same_as(eq)


class TestParams:
    """Tests for the parameter bundles."""

    def test_lambda(self, p2):
        assert p2.lam == HalfInt(1)
        assert p2.total == 2

    def test_lambda_must_be_half_integer(self, ctx):
        """h1 = 1/2 with everything else 0 gives lambda = 3/4."""
        with pytest.raises(InvalidParameterError):
            Params2.create(ctx, h1="1/2", h2=0, l1=0, l2=0, alpha1=0, alpha2=0, t1=1, t2=2)

    def test_t_must_be_nonzero(self, ctx):
        with pytest.raises(InvalidParameterError):
            Params2.create(ctx, h1=1, h2=0, l1=0, l2=0, alpha1=0, alpha2=1, t1=0, t2=2)

    def test_swaps(self, p2):
        swapped = p2.swapped_indices()
        assert (swapped.h1, swapped.h2, swapped.t1, swapped.t2) == (p2.h2, p2.h1, p2.t2, p2.t1)
        assert swapped.lam == p2.lam
        assert p2.swapped_alphas().alpha1 == p2.alpha2

    def test_params3_nu_and_permutation(self, ctx):
        p3 = Params3.create(ctx, h1=1, h2=0, h3=0, l1=0, l2=0, l3=0, alpha=0, t1=1, t2=2, t3=3)
        assert p3.nu == 1
        perm = p3.permuted((3, 1, 2))
        assert (perm.t1, perm.t2, perm.t3) == (3, 1, 2)
        assert (perm.h1, perm.h2, perm.h3) == (0, 1, 0)
        assert perm.nu == p3.nu

    def test_float_mode_params_unrestricted(self):
        fctx = QContext.floating(0.5)
        p2 = Params2.create(fctx, h1=0.3, h2=0, l1=0, l2=0, alpha1=0, alpha2=0, t1=1, t2=2)
        assert p2.lam == pytest.approx(0.65)


class TestVariantDeg2:
    """Tests for the q-Heun equation and its degree-2 variant."""

    def test_energy(self, ctx, p2):
        """E = -(1/4){2 t1 + 5 t2} = -3."""
        assert variant_deg2_energy(ctx, p2) == -3

    def test_coefficients(self, ctx, p2):
        eq = make_variant_deg2(ctx, p2)
        assert eq.u == Poly.from_roots([Fraction(1, 8), Fraction(1)])
        assert eq.w == Poly.from_roots([Fraction(2), Fraction(4)], lead=Fraction(1, 4))
        assert eq.v.coeffs == (Fraction(-5, 4), Fraction(3), Fraction(-5, 4))
        assert eq.name == "var2"

    def test_qheun_beta_parity(self, ctx, p2):
        """h1+h2+l1+l2+alpha1+alpha2 = 2, so beta = 1/2 breaks integrality."""
        with pytest.raises(InvalidParameterError):
            make_qheun(ctx, p2, HalfInt(1), Fraction(1))

    def test_qheun_with_beta_one_matches_variant(self, ctx, p2):
        eq = make_qheun(ctx, p2, HalfInt(2), variant_deg2_energy(ctx, p2))
        assert eq.same_as(make_variant_deg2(ctx, p2))

    def test_qheun_with_beta_one_matches_variant_on_draws(self, ctx):
        for index in range(20):
            params = draw_params2(rng_for(11, index), ctx)
            eq = make_qheun(ctx, params, HalfInt(2), variant_deg2_energy(ctx, params))
            assert eq.same_as(make_variant_deg2(ctx, params)), index

    def test_index_swap_invariance(self, ctx, p2):
        """(h1, l1, t1) <-> (h2, l2, t2) and alpha1 <-> alpha2 leave the operator unchanged."""
        eq = make_variant_deg2(ctx, p2)
        assert make_variant_deg2(ctx, p2.swapped_indices()).same_as(eq)
        assert make_variant_deg2(ctx, p2.swapped_alphas()).same_as(eq)
        for index in range(5):
            params = draw_params2(rng_for(5, index), ctx)
            eq = make_variant_deg2(ctx, params)
            assert make_variant_deg2(ctx, params.swapped_indices()).same_as(eq)
            assert make_variant_deg2(ctx, params.swapped_alphas()).same_as(eq)

    def test_float_same_as_tolerates_roundoff(self):
        fctx = QContext.floating(0.7)
        p2 = Params2.create(fctx, h1=1, h2=0, l1=0, l2=0, alpha1=0, alpha2=1, t1=1, t2=2)
        eq = make_variant_deg2(fctx, p2)
        nudged = eq.scaled(1 + 1e-14)
        assert nudged.same_as(eq)
        assert not eq.scaled(1 + 1e-6).same_as(eq)
        assert make_variant_deg2(fctx, p2.swapped_indices()).same_as(eq)


class TestVariantDeg3:
    """Tests for the degree-3 variant."""

    def test_shape(self, ctx):
        p3 = Params3.create(ctx, h1=1, h2=0, h3=0, l1=0, l2=0, l3=0, alpha=0, t1=1, t2=2, t3=3)
        eq = make_variant_deg3(ctx, p3)
        assert eq.u.degree() == 3
        assert eq.w.degree() == 3
        assert eq.v.degree() == 3
        # 首项: u 为首一，w 为 q^{2alpha+1}
        assert eq.u.coeff(3) == 1
        assert eq.w.coeff(3) == Fraction(1, 4)
        assert eq.v.coeff(3) == -(Fraction(1, 4) + 1)

    @pytest.mark.parametrize("perm", [(1, 2, 3), (2, 3, 1), (3, 1, 2), (2, 1, 3)])
    def test_permutation_invariance(self, ctx, perm):
        p3 = Params3.create(ctx, h1=1, h2=0, h3=0, l1=0, l2=0, l3=0, alpha=0, t1=1, t2=2, t3=3)
        eq = make_variant_deg3(ctx, p3)
        assert make_variant_deg3(ctx, p3.permuted(perm)).same_as(eq)

    def test_cyclic_invariance_on_draws(self, ctx):
        for index in range(5):
            p3 = draw_params3(rng_for(7, index), ctx)
            eq = make_variant_deg3(ctx, p3)
            for perm in ((2, 3, 1), (3, 1, 2)):
                assert make_variant_deg3(ctx, p3.permuted(perm)).same_as(eq), (index, perm)


class TestApply:
    """Tests for pointwise application of the operator."""

    def test_linear(self, ctx, p2):
        eq = make_variant_deg2(ctx, p2)

        def f(x):
            return x * x + 1

        def g(x):
            return 1 / (x + 3)

        x = Fraction(2, 3)
        combined = apply(eq, lambda z: 2 * f(z) - 5 * g(z), x)
        assert combined == 2 * apply(eq, f, x) - 5 * apply(eq, g, x)


class TestGolden:
    """Golden file for g2 at the default parameters."""

    def test_g2_golden(self, ctx, p2):
        expected = json.loads((GOLDEN / "g2_golden.json").read_text(encoding="utf-8"))
        assert series_to_json(g2_series(ctx, p2, 1, 2)) == expected

    def test_g2_golden_decodes(self, ctx, p2):
        data = json.loads((GOLDEN / "g2_golden.json").read_text(encoding="utf-8"))
        assert series_from_json(ctx, data) == g2_series(ctx, p2, 1, 2)

    def test_float_power_series_survives_json(self):
        fctx = QContext.floating(0.5)
        p2 = Params2.create(fctx, h1=1, h2=0, l1=0, l2=0, alpha1=0, alpha2=1, t1=1, t2=2)
        series = local_series_zero(make_variant_deg2(fctx, p2), p2.lam, 5)
        decoded = series_from_json(fctx, json.loads(json.dumps(series_to_json(series))))
        assert decoded == series

    def test_wrong_schema_rejected(self, ctx):
        with pytest.raises(InvalidParameterError):
            series_from_json(ctx, {"schema": "qvariant.series/0", "kind": "power", "coeffs": []})

    def test_g2_coefficients(self, ctx, p2):
        series = g2_series(ctx, p2, 1, 2)
        assert series.coeffs == (1, Fraction(14, 45), Fraction(496, 6075))
        assert series.node == 2
        assert series.prefactor_exponent == HalfInt(1)
