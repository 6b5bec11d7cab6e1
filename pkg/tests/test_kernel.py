"""Unit tests for the graded symbolic kernel."""

from fractions import Fraction

import pytest

from hjcanon import kernel as K
from hjcanon.errors import GradingError, OddDenominatorError
from hjcanon.kernel import (EVEN, ODD, Generator, Scalar, atom, derive_left,
                            derive_right, equals, multiply, normalize, scalar,
                            substitute)

from conftest import ToyAlgebra

T = ToyAlgebra()
t1, t2, t3, t4 = T.thetas
x, y, e = T.x, T.y, T.e
ax, ae = atom(x), atom(e)
a1, a2 = atom(t1), atom(t2)


class TestScalar:
    def test_imaginary_unit_squares_to_minus_one(self):
        assert Scalar.of(0, 1) * Scalar.of(0, 1) == Scalar.of(-1)

    def test_exact_division(self):
        s = Scalar.of(Fraction(1, 3), Fraction(1, 2))
        assert s * s.inverse() == Scalar.of(1)

    def test_zero_has_no_inverse(self):
        with pytest.raises(ZeroDivisionError):
            Scalar.of(0).inverse()


class TestNormalForm:
    def test_odd_swap_antisymmetry(self):
        assert equals(a2 * a1, -(a1 * a2))

    def test_nilpotency(self):
        assert (a1 * a1).is_zero()

    def test_like_term_merge(self):
        assert str(ax + ax) == "2*x"

    def test_normalize_idempotent(self):
        expr = (ax + a1 * a2) / ae
        assert normalize(normalize(expr)) == normalize(expr)

    def test_zero_representation(self):
        z = ax - ax
        assert z.num == () and z.den == (K.ONE_MONOMIAL,)


class TestMultiply:
    def test_sign_rule_on_reorder(self):
        chi = t3
        psi0 = t1  # lower ordinal than chi
        prod = multiply(atom(chi), atom(psi0))
        assert equals(prod, -(atom(psi0) * atom(chi)))

    def test_fraction_cancellation(self):
        assert equals((K.ONE / ae) * ae, K.ONE)

    def test_square_of_common_odd_factor_vanishes(self):
        chi, p0, p1 = t3, t1, t2
        lhs = K.I * atom(chi) * atom(p0)
        rhs = K.I * atom(chi) * atom(p1)
        assert (lhs * rhs).is_zero()

    def test_graded_commutativity_even_odd(self):
        assert equals(ax * a1, a1 * ax)
        assert equals(a1 * a2, -(a2 * a1))


class TestDerivatives:
    def test_right_strip_rightmost(self):
        assert equals(derive_right(a1 * a2, t2), a1)

    def test_right_strip_with_transposition(self):
        assert equals(derive_right(a1 * a2, t1), -a2)

    def test_left_strip_leftmost(self):
        assert equals(derive_left(a1 * a2, t1), a2)

    def test_left_strip_with_transposition(self):
        assert equals(derive_left(a1 * a2, t2), -a1)

    def test_even_leibniz(self):
        assert equals(derive_left(ax * ax * a1, x), 2 * ax * a1)

    def test_quotient_rule(self):
        expr = ax * ax / ae
        assert equals(derive_right(expr, e), -(ax * ax) / (ae * ae))

    def test_left_right_agree_on_even(self):
        expr = ax * ax * a1 * a2
        assert equals(derive_left(expr, x), derive_right(expr, x))


class TestSubstitute:
    def test_substitution_kills_by_nilpotency(self):
        assert substitute(a1 * a2, {t1: a2}).is_zero()

    def test_zero_substitution(self):
        assert substitute(ax * a1, {x: K.ZERO}).is_zero()

    def test_parity_mismatch_rejected(self):
        with pytest.raises(GradingError):
            substitute(ax, {x: a1})

    def test_simultaneous_not_sequential(self):
        swapped = substitute(a1 * a2, {t1: a2, t2: a1})
        assert equals(swapped, -(a1 * a2))


class TestEquals:
    def test_fraction_equivalence(self):
        assert equals(ax / ae, ax * ae / (ae * ae))

    def test_odd_reorder_equivalence(self):
        assert equals(a1 * a2, -(a2 * a1))

    def test_sign_difference_detected(self):
        p2 = ax * ax
        m2 = atom(y) * atom(y)
        assert not equals(p2 - m2, p2 + m2)


class TestDenominators:
    def test_odd_denominator_rejected(self):
        with pytest.raises(OddDenominatorError):
            ax / a1

    def test_mixed_parity_denominator_rejected(self):
        with pytest.raises(OddDenominatorError):
            ax / (ae + a1 * ae)

    def test_division_by_zero_rejected(self):
        with pytest.raises(ZeroDivisionError):
            ax / (ae - ae)

    def test_negative_power_inverts(self):
        assert equals(ae ** -2, K.ONE / (ae * ae))


def test_scalar_helpers():
    assert scalar(Fraction(3, 4)).scalar_value() == Scalar.of(Fraction(3, 4))
    assert K.I.parity() == EVEN
    assert atom(t1).parity() == ODD
    assert (a1 * a2).parity() == EVEN
