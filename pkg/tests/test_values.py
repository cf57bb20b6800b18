from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from treecut.values import INFINITY, ScaledValue, format_rational, parse_rational


class TestParseRational:
    @pytest.mark.parametrize("raw,expected", [
        (3, Fraction(3)),
        ("3/4", Fraction(3, 4)),
        ("0.25", Fraction(1, 4)),
        (" 1/2 ", Fraction(1, 2)),
        (Fraction(7, 5), Fraction(7, 5)),
        (0.1, Fraction(1, 10)),
        ("-2/3", Fraction(-2, 3)),
    ])
    def test_accepted(self, raw, expected):
        assert parse_rational(raw) == expected

    @pytest.mark.parametrize("raw", ["", "x", "1/0", True, None, [1]])
    def test_rejected(self, raw):
        with pytest.raises(ValueError):
            parse_rational(raw)

    def test_format_always_carries_denominator(self):
        assert format_rational(Fraction(0)) == "0/1"
        assert format_rational(Fraction(3, 4)) == "3/4"
        assert format_rational(Fraction(-6, 4)) == "-3/2"


class TestScaledValue:
    def test_infinity_absorbs_addition(self):
        assert (INFINITY + ScaledValue(5)).is_infinite
        assert (ScaledValue(5) + INFINITY).is_infinite
        assert (INFINITY + INFINITY).is_infinite

    def test_infinity_dominates(self):
        assert ScaledValue(10**30) < INFINITY
        assert INFINITY <= INFINITY
        assert INFINITY == INFINITY
        assert not INFINITY < INFINITY

    def test_finite_arithmetic_exact(self):
        big = 10**40
        assert (ScaledValue(big) + ScaledValue(1)).finite() == big + 1

    def test_finite_accessor_raises_on_infinity(self):
        with pytest.raises(ValueError):
            INFINITY.finite()

    def test_int_comparisons(self):
        assert ScaledValue(3) <= 3
        assert ScaledValue(3) == 3
        assert ScaledValue(2) < 3

    @given(st.integers(), st.integers())
    def test_order_matches_int_order(self, a, b):
        assert (ScaledValue(a) < ScaledValue(b)) == (a < b)
        assert (ScaledValue(a) + ScaledValue(b)).finite() == a + b

    @given(st.integers() | st.none())
    def test_infinity_is_maximal(self, a):
        assert ScaledValue(a) <= INFINITY
