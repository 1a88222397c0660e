from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qseries_types import InsufficientPrecision, InvalidSpec, ZeroLeadingTerm
from series_core import (
    ONE, ZERO, Equal, FirstMismatch, QSeries, evaluate_to_order, monomial, render_series, series_add,
    series_dilate, series_divide, series_eq_upto, series_invert, series_mul, series_negate_q, series_pow,
    series_shift, series_sub, series_truncate, zero,
)

coefficients = st.one_of(
    st.integers(min_value=-5, max_value=5),
    st.fractions(min_value=-3, max_value=3, max_denominator=6),
)
polynomials = st.dictionaries(st.integers(min_value=-4, max_value=8), coefficients, max_size=6).map(QSeries)
units = polynomials.filter(lambda p: not p.is_zero)


@given(polynomials, polynomials)
def test_addition_and_multiplication_commute(a, b):
    assert series_add(a, b) == series_add(b, a)
    assert series_mul(a, b) == series_mul(b, a)


@given(polynomials, polynomials, polynomials)
def test_multiplication_is_associative_and_distributive(a, b, c):
    assert series_mul(series_mul(a, b), c) == series_mul(a, series_mul(b, c))
    assert series_mul(a, series_add(b, c)) == series_add(series_mul(a, b), series_mul(a, c))


@given(polynomials)
def test_subtracting_a_series_from_itself_gives_exact_zero(a):
    assert series_sub(a, a) == ZERO
    assert series_mul(a, ONE) == a


@given(polynomials, polynomials, st.integers(min_value=1, max_value=4))
def test_dilation_is_a_ring_homomorphism(a, b, m):
    assert series_dilate(series_mul(a, b), m) == series_mul(series_dilate(a, m), series_dilate(b, m))
    assert series_dilate(series_add(a, b), m) == series_add(series_dilate(a, m), series_dilate(b, m))


@given(polynomials)
def test_negating_q_twice_is_the_identity(a):
    assert series_negate_q(series_negate_q(a)) == a


@given(units)
def test_inverse_times_series_is_one(a):
    N = 10
    inverse = series_invert(a, N)
    valuation = a.min_exp
    checked = N + min(valuation, 0)
    assert series_eq_upto(series_mul(a, inverse), ONE, checked).equal


def test_partition_generating_function():
    euler = QSeries({0: 1, 1: -1, 2: -1, 5: 1, 7: 1, 12: -1, 15: -1})
    partitions = series_invert(euler, 10)
    assert [partitions[e] for e in range(11)] == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]
    assert partitions.order == 10


def test_divide_by_one_minus_q_gives_geometric_series():
    quotient = series_divide(ONE, QSeries({0: 1, 1: -1}), 6)
    assert quotient == QSeries({e: 1 for e in range(7)}, 6)


def test_product_order_follows_valuations():
    a = series_truncate(QSeries({0: 1, 1: 1}), 5)
    b = series_shift(series_truncate(ONE, 5), 2)
    assert series_mul(a, b).order == 7


def test_inverting_zero_raises():
    with pytest.raises(ZeroLeadingTerm):
        series_invert(zero(8), 8)


def test_comparison_past_certified_order_raises():
    with pytest.raises(InsufficientPrecision):
        series_eq_upto(series_truncate(ONE, 5), ONE, 6)
    with pytest.raises(InsufficientPrecision):
        series_truncate(ONE, 5)[6]


def test_first_mismatch_reports_lowest_exponent():
    report = series_eq_upto(QSeries({0: 1, 3: 2}), QSeries({0: 1, 3: 5, 4: 1}), 10)
    assert report == FirstMismatch(3, 2, 5)
    assert not report.equal
    assert series_eq_upto(ONE, ONE, 10) == Equal(10)


def test_coefficients_are_exact_rationals():
    half = QSeries({0: Fraction(1, 2)})
    assert series_add(half, half) == ONE
    assert series_pow(half, 3)[0] == Fraction(1, 8)


def test_invalid_arguments_raise():
    with pytest.raises(InvalidSpec):
        series_dilate(ONE, 0)
    with pytest.raises(InvalidSpec):
        series_pow(ONE, -1)


def test_evaluate_to_order_adds_headroom():
    calls = []

    def build(working):
        calls.append(working)
        return series_truncate(ONE, working - 2)

    result = evaluate_to_order(build, 10)
    assert calls == [10, 12]
    assert result.order == 10


def test_evaluate_to_order_gives_up():
    with pytest.raises(InsufficientPrecision):
        evaluate_to_order(lambda working: zero(0), 5)


@pytest.mark.parametrize("series,text", [
    (QSeries({0: 1, 1: 2, 2: 3, 3: 4}), "1 + 2*q + 3*q^2 + 4*q^3"),
    (QSeries({0: 1, 1: -2, 3: Fraction(1, 2)}), "1 - 2*q + 1/2*q^3"),
    (QSeries({-1: -1, 2: 1}), "-q^-1 + q^2"),
    (ZERO, "0"),
    (monomial(-3, 0), "-3"),
])
def test_render_series(series, text):
    assert render_series(series) == text
