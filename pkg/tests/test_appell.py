"""
Tests for the q-Appell function and its difference relations.
"""

from fractions import Fraction

import pytest

from qvariant.analysis.appell import (
    DoubleSeriesSpec,
    appell_g1_coefficients,
    contiguous_operators,
    contiguous_residuals,
    elimination_identities,
    elimination_pairs,
    elimination_residuals,
    phi1,
    phi1_coefficients,
    require_nonterminating,
    restricted_operator,
    second_order_cbb_residual,
    second_order_operator,
    specialize_to_variant2,
    third_order_residual,
)
from qvariant.analysis.closedform import g1_series
from qvariant.analysis.errors import (
    InvalidParameterError,
    TerminatingSeriesError,
    VanishingDenominatorError,
)
from qvariant.analysis.qcore import QContext
from qvariant.analysis.qdiff import Params2, make_variant_deg2

A, B, BP, C = Fraction(1, 3), Fraction(2, 5), Fraction(3, 7), Fraction(5, 11)
X, Y = Fraction(1, 10), Fraction(1, 20)


@pytest.fixture
def ctx():
    return QContext.exact(Fraction(1, 2))


class TestCoefficients:
    """Tests for the double series coefficients."""

    def test_first_slots(self, ctx):
        coeffs = phi1_coefficients(ctx, DoubleSeriesSpec(A, B, BP, C, 2))
        q = ctx.q
        assert coeffs.get(0, 0) == 1
        assert coeffs.get(1, 0) == (1 - A) * (1 - B) / ((1 - C) * (1 - q))
        assert coeffs.get(0, 1) == (1 - A) * (1 - BP) / ((1 - C) * (1 - q))
        # 截断外为 0
        assert coeffs.get(2, 1) == 0
        assert coeffs.get(-1, 0) == 0
        assert len(list(coeffs.slots())) == 6

    def test_partial_sum(self, ctx):
        coeffs = phi1_coefficients(ctx, DoubleSeriesSpec(A, B, BP, C, 3))
        expected = sum(F * X**m * Y**n for (m, n), F in coeffs.table.items())
        assert phi1(ctx, A, B, BP, C, X, Y, 3) == expected

    def test_vanishing_denominator(self, ctx):
        """c = q^{-1}"""
        with pytest.raises(VanishingDenominatorError):
            phi1_coefficients(ctx, DoubleSeriesSpec(A, B, BP, Fraction(4), 3))

    def test_negative_truncation(self):
        with pytest.raises(InvalidParameterError):
            DoubleSeriesSpec(A, B, BP, C, -1)

    def test_symmetry_in_the_two_variables(self, ctx):
        """Phi(a; b, b'; c; x, y) = Phi(a; b', b; c; y, x)."""
        assert phi1(ctx, A, B, BP, C, X, Y, 5) == phi1(ctx, A, BP, B, C, Y, X, 5)
        left = phi1_coefficients(ctx, DoubleSeriesSpec(A, B, BP, C, 4))
        right = phi1_coefficients(ctx, DoubleSeriesSpec(A, BP, B, C, 4))
        assert all(left.get(m, n) == right.get(n, m) for m, n in left.slots())

    @pytest.mark.parametrize("field,value", [("a", 1), ("a", 4), ("b", 1), ("b_prime", 4)])
    def test_terminating_parameters_rejected(self, ctx, field, value):
        """a = 1 collapses the series to 1; q = 1/4 makes 4 = q^{-1} terminate it at order 2."""
        values = {"a": A, "b": B, "b_prime": BP, "c": C, "M": 5}
        values[field] = Fraction(value)
        with pytest.raises(TerminatingSeriesError) as info:
            require_nonterminating(ctx, DoubleSeriesSpec(**values))
        assert info.value.name == field

    def test_generic_parameters_accepted(self, ctx):
        require_nonterminating(ctx, DoubleSeriesSpec(A, B, BP, C, 8))

    def test_float_unit_parameter_rejected(self):
        fctx = QContext.floating(0.5)
        spec = DoubleSeriesSpec(1.0 + 0j, 0.4 + 0j, 0.3 + 0j, 0.5 + 0j, 4)
        with pytest.raises(TerminatingSeriesError):
            require_nonterminating(fctx, spec)


class TestFirstOrderRelations:
    """Tests for the two contiguous relations and the elimination chain."""

    def test_contiguous_relations_slotwise(self, ctx):
        for m in range(4):
            for n in range(4 - m):
                assert contiguous_residuals(ctx, A, B, BP, C, m, n) == (0, 0)

    def test_elimination_chain_is_exact(self, ctx):
        """Each printed relation equals the combination of the two first-order relations."""
        for name, op in elimination_identities(ctx, A, B, BP, C).items():
            assert op.is_zero(), name

    def test_elimination_residuals_slotwise(self, ctx):
        for m in range(3):
            for n in range(3 - m):
                assert all(r == 0 for r in elimination_residuals(ctx, A, B, BP, C, m, n).values())

    def test_third_order_residual(self, ctx):
        M = 6
        result = third_order_residual(ctx, A, B, BP, C, X, Y, M)
        assert result.passed
        assert result.max_interior == 0
        assert result.interior_slots == 10  # m+n <= 3
        assert all(m + n > M - 3 for (m, n) in result.boundary)


class TestSecondOrderRelation:
    """Tests for the second-order relation at c = bb'."""

    def test_holds_at_c_equal_bb(self, ctx):
        result = second_order_cbb_residual(ctx, A, B, BP, X, Y, 6)
        assert result.passed
        assert result.interior_value == 0

    def test_detects_wrong_c(self, ctx):
        result = second_order_cbb_residual(ctx, A, B, BP, X, Y, 6, c=B * BP * Fraction(8, 7))
        assert not result.passed

    def test_constant_slot_vanishes(self, ctx):
        action = second_order_operator(ctx, A, B, BP).monomial_action(0, 0)
        assert (0, 0) not in action


class TestFloatMode:
    """The same relations with complex scalars and a relative tolerance."""

    @pytest.fixture
    def fctx(self):
        return QContext.floating(0.7)

    @pytest.fixture
    def values(self):
        return tuple(complex(float(v)) for v in (A, B, BP, C, X, Y))

    def test_elimination_chain_matches(self, fctx, values):
        a, b, bp, c, _, _ = values
        for name, (printed, derived) in elimination_pairs(fctx, a, b, bp, c).items():
            assert printed.matches(derived), name

    def test_matches_detects_a_different_operator(self, fctx, values):
        a, b, bp, c, _, _ = values
        printed, derived = elimination_pairs(fctx, a, b, bp, c)["third"]
        assert not printed.matches(derived.scaled(1.001))

    def test_slot_residuals_against_their_terms(self, fctx, values):
        a, b, bp, c, _, _ = values
        coeffs = phi1_coefficients(fctx, DoubleSeriesSpec(a, b, bp, c, 5))
        first, second = contiguous_operators(fctx, a, b, bp, c)
        for m in range(4):
            for n in range(4 - m):
                for op in (first, second):
                    assert fctx.is_zero(op.slot_residual(coeffs, m, n), op.slot_scale(coeffs, m, n))

    def test_second_order_relation_and_detector(self, fctx, values):
        a, b, bp, _, x, y = values
        assert second_order_cbb_residual(fctx, a, b, bp, x, y, 8).passed
        assert not second_order_cbb_residual(fctx, a, b, bp, x, y, 8, c=b * bp * (8 / 7)).passed

    def test_third_order_residual(self, fctx, values):
        assert third_order_residual(fctx, *values, 8).passed

    def test_restricted_operator_is_variant(self):
        fctx = QContext.floating(0.7)
        p2 = Params2.create(fctx, h1=1, h2=0, l1=0, l2=0, alpha1=1, alpha2=0, t1=1, t2=2)
        spec = specialize_to_variant2(fctx, p2)
        assert restricted_operator(fctx, spec).same_as(make_variant_deg2(fctx, p2))


class TestVariant2Specialization:
    """Tests for the link between the Appell function and g1."""

    @pytest.fixture
    def p2(self, ctx):
        # alpha1 = 1, alpha2 = 0
        return Params2.create(ctx, h1=1, h2=0, l1=0, l2=0, alpha1=1, alpha2=0, t1=1, t2=2)

    def test_restricted_operator_is_variant(self, ctx, p2):
        spec = specialize_to_variant2(ctx, p2)
        assert restricted_operator(ctx, spec).same_as(make_variant_deg2(ctx, p2))

    def test_restricted_operator_default_params(self, ctx):
        p2 = Params2.create(ctx, h1=1, h2=0, l1=0, l2=0, alpha1=0, alpha2=1, t1=1, t2=2)
        spec = specialize_to_variant2(ctx, p2)
        assert spec.c == spec.b * spec.b_prime
        assert restricted_operator(ctx, spec).same_as(make_variant_deg2(ctx, p2))

    def test_g1_from_appell(self, ctx, p2):
        coeffs = appell_g1_coefficients(ctx, p2, 5)
        assert coeffs[1] == Fraction(7, 6)
        assert coeffs == list(g1_series(ctx, p2, 5).coeffs)
