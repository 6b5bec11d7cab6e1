"""Property tests for the kernel algebra laws."""

import random

from hypothesis import given, settings, strategies as st

from hjcanon import kernel as K
from hjcanon.kernel import derive_left, derive_right, equals, normalize

from conftest import ToyAlgebra

T = ToyAlgebra()

seeds = st.integers(min_value=0, max_value=10 ** 9)
parities = st.integers(min_value=0, max_value=1)


def _expr(seed, parity=None):
    return T.random_expr(random.Random(seed), parity)


@settings(max_examples=120, deadline=None)
@given(seeds)
def test_normalize_idempotent(seed):
    expr = _expr(seed)
    assert normalize(normalize(expr)) == normalize(expr)


@settings(max_examples=120, deadline=None)
@given(seeds, parities, parities)
def test_graded_commutativity(seed, pa, pb):
    rng = random.Random(seed)
    a = T.random_expr(rng, pa)
    b = T.random_expr(rng, pb)
    sign = K.scalar(-1) ** (pa * pb)
    assert equals(a * b, sign * (b * a))


@settings(max_examples=120, deadline=None)
@given(seeds, parities)
def test_right_leibniz(seed, pb):
    rng = random.Random(seed)
    a = T.random_expr(rng)
    b = T.random_expr(rng, pb)
    for theta in T.thetas:
        lhs = derive_right(a * b, theta)
        rhs = a * derive_right(b, theta) \
            + K.scalar(-1) ** pb * derive_right(a, theta) * b
        assert equals(lhs, rhs)


@settings(max_examples=120, deadline=None)
@given(seeds, parities)
def test_left_leibniz(seed, pa):
    rng = random.Random(seed)
    a = T.random_expr(rng, pa)
    b = T.random_expr(rng)
    for theta in T.thetas:
        lhs = derive_left(a * b, theta)
        rhs = derive_left(a, theta) * b \
            + K.scalar(-1) ** pa * a * derive_left(b, theta)
        assert equals(lhs, rhs)


@settings(max_examples=120, deadline=None)
@given(seeds)
def test_odd_homogeneous_square_vanishes(seed):
    expr = _expr(seed, parity=1)
    assert (expr * expr).is_zero()


@settings(max_examples=120, deadline=None)
@given(seeds)
def test_left_right_sign_relation_per_monomial(seed):
    expr = _expr(seed)
    for mono in expr.num:
        k = len(mono.odd)
        single = K.GradedExpr((mono,))
        for theta in mono.odd:
            lhs = derive_left(single, theta)
            rhs = K.scalar(-1) ** (k - 1) * derive_right(single, theta)
            assert equals(lhs, rhs)


@settings(max_examples=120, deadline=None)
@given(seeds)
def test_left_right_agree_on_even(seed):
    expr = _expr(seed)
    for g in (T.x, T.y):
        assert equals(derive_left(expr, g), derive_right(expr, g))
