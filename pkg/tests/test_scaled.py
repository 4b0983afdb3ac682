import math

from hypothesis import given
from hypothesis import strategies as st

from orderk.scaled import ScaledFloat, format_decimal, scaled_sum

positive = st.floats(min_value=1e-300, max_value=1e300, allow_nan=False)


@given(positive)
def test_significand_in_unit_octave(v):
    s = ScaledFloat.from_float(v)
    assert 1.0 <= s.significand < 2.0
    assert s.to_float() == v


@given(positive, positive)
def test_sum_matches_float_sum(a, b):
    s = scaled_sum([ScaledFloat.from_float(a), ScaledFloat.from_float(b)])
    assert math.isclose(s.to_float(), a + b, rel_tol=1e-15)


def test_far_outside_double_range():
    tiny = ScaledFloat(1.5, -5000)
    big = ScaledFloat(1.25, 5000)
    assert tiny < big
    assert tiny.to_float() == 0.0
    assert math.isclose(big.log(), math.log(1.25) + 5000 * math.log(2))
    assert (big * tiny).exponent == 0


def test_signed_gap():
    a, b = ScaledFloat.from_float(3.0), ScaledFloat.from_float(2.0)
    assert math.isclose(a.signed_gap(b), 1 / 3)
    assert math.isclose(b.signed_gap(a), -1 / 3)
    assert a.signed_gap(a) == 0.0


def test_format_decimal():
    assert format_decimal(math.log10(0.0297464817), 10) == "0.0297464817"
    assert format_decimal(-1000.5, 4) == "3.162e-1001"
    assert format_decimal(-math.inf, 10) == "0"
