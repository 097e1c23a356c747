from __future__ import annotations

import math
from decimal import Decimal, getcontext
from fractions import Fraction as Q

import pytest
from hypothesis import given, strategies as st

from slopelab.errors import ExactDivisionByZero, MixedFieldsError, ScalarParseError
from slopelab.numeric import (QuadraticSurd, arith, format_scalar, parse_scalar, sign, sqrt,
                              surd, to_decimal)

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=40)


def in_field(d):
    return st.builds(lambda a, b: surd(a, b, d), rationals, rationals)


def decimal_value(x, prec=60):
    """Independent evaluation through Decimal square roots."""
    getcontext().prec = prec
    if isinstance(x, QuadraticSurd):
        a, b = x.a, x.b
        return (Decimal(a.numerator) / Decimal(a.denominator)
                + Decimal(b.numerator) / Decimal(b.denominator) * Decimal(x.d).sqrt())
    return Decimal(x.numerator) / Decimal(x.denominator)


def test_square_of_three_plus_root_six():
    x = surd(3, 1, 6)
    assert arith("mul", x, x) == surd(15, 6, 6)


def test_compare_golden_threshold_with_decimal():
    # 2.237^2 = 5.004169 > 5, so 2 + sqrt 5 sits below 4.237
    assert arith("cmp", surd(2, 1, 5), Q(4237, 1000)) == -1
    assert arith("cmp", surd(2, 1, 5), Q(4236, 1000)) == 1


def test_rational_subtraction():
    assert arith("sub", Q(132, 25), 1) == Q(107, 25)


@pytest.mark.parametrize("x, digits, expected", [
    (surd(2, 1, 5), 7, "4.2360680"),
    (Q(157, 264), 6, "0.594697"),
    (Q(0), 3, "0.000"),
    (Q(-1, 3), 4, "-0.3333"),
    (surd(3, 1, 6), 12, "5.449489742783"),
])
def test_to_decimal_examples(x, digits, expected):
    assert to_decimal(x, digits) == expected


def test_to_decimal_matches_long_division():
    for n, d in [(1, 7), (22, 7), (355, 113), (157, 264)]:
        q, r = divmod(n * 10**9, d)
        expected = q + (1 if 2 * r >= d else 0)
        assert to_decimal(Q(n, d), 9).replace(".", "").lstrip("0") == str(expected)


def test_b_zero_normalises_to_rational():
    x = surd(3, 0, 6)
    assert isinstance(x, Q) and x == 3
    y = surd(1, 1, 6) - surd(0, 1, 6)
    assert isinstance(y, Q) and y == 1


def test_square_factors_are_pulled_out():
    assert surd(0, 1, 12) == surd(0, 2, 3)
    assert sqrt(Q(9, 4)) == Q(3, 2)


def test_mixed_fields_rejected():
    with pytest.raises(MixedFieldsError):
        surd(1, 1, 5) + surd(1, 1, 6)


def test_division_by_zero():
    with pytest.raises(ExactDivisionByZero):
        arith("div", surd(1, 1, 5), 0)
    with pytest.raises(ZeroDivisionError):
        surd(1, 1, 5) / Q(0)


@pytest.mark.parametrize("text", ["132/25", "3+1*sqrt(6)", "-7", "1/2+-3/4*sqrt(5)", "0+1*sqrt(2)"])
def test_grammar_round_trip(text):
    x = parse_scalar(text)
    assert parse_scalar(format_scalar(x)) == x


@pytest.mark.parametrize("text", ["1/0", "abc", "3+sqrt(6)", "1.5", ""])
def test_grammar_rejects(text):
    with pytest.raises(ScalarParseError):
        parse_scalar(text)


@pytest.mark.parametrize("d", [5, 6])
@given(data=st.data())
def test_field_axioms(d, data):
    x, y, z = (data.draw(in_field(d)) for _ in range(3))
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + (-x) == 0
    if x != 0:
        assert x * (1 / x) == 1


@given(rationals, rationals, rationals)
def test_rational_field_axioms(x, y, z):
    assert x * (y + z) == x * y + x * z
    if y != 0:
        assert (x / y) * y == x


@given(in_field(6), in_field(6))
def test_order_is_total_and_matches_decimal(x, y):
    c = arith("cmp", x, y)
    assert c == -arith("cmp", y, x)
    dx, dy = decimal_value(x), decimal_value(y)
    if c == 0:
        assert x == y
    else:
        assert (dx > dy) == (c > 0)


@given(in_field(5), st.integers(min_value=1, max_value=25))
def test_to_decimal_within_half_ulp(x, digits):
    rendered = Decimal(to_decimal(x, digits))
    getcontext().prec = 80
    err = abs(rendered - decimal_value(x, 80))
    assert err <= Decimal(1).scaleb(-digits) / 2 + Decimal(1).scaleb(-70)


@given(in_field(5))
def test_floor_agrees_with_float(x):
    f = float(x)
    if abs(f - round(f)) > 1e-9:
        assert math.floor(x) == math.floor(f)


@given(in_field(6))
def test_normalisation_idempotent(x):
    y = parse_scalar(format_scalar(x))
    assert y == x and format_scalar(y) == format_scalar(x)


@given(in_field(6))
def test_sign_consistent_with_norm(x):
    if isinstance(x, QuadraticSurd):
        assert sign(x) == (1 if decimal_value(x) > 0 else -1)
