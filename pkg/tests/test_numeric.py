import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ceresa_check.errors import DomainError
from ceresa_check.numeric import (
    EXT,
    RationalAngle,
    SeriesValue,
    compensated_sum,
    frac_distance,
    sum_values,
)


def test_rational_angle_reduces():
    r = RationalAngle(6, 14)
    assert (r.numerator, r.denominator) == (3, 7)
    assert not r.general


@pytest.mark.parametrize("num,den", [(0, 5), (5, 5), (7, 5), (-1, 3)])
def test_rational_angle_rejects_out_of_range(num, den):
    with pytest.raises(DomainError):
        RationalAngle(num, den)


def test_rational_angle_general_regime():
    r = RationalAngle.of(Fraction(9, 7))
    assert r.general and r.fraction == Fraction(9, 7)
    assert not RationalAngle.of(Fraction(2, 7)).general


def test_series_value_rejects_bad_fields():
    with pytest.raises(ValueError):
        SeriesValue(1.0, -1e-3)
    with pytest.raises(ValueError):
        SeriesValue(float("nan"), 0.0)
    with pytest.raises(ValueError):
        SeriesValue(1.0, 0.0, method="guess")


@given(
    st.floats(-1e6, 1e6), st.floats(0, 1e-3),
    st.floats(-1e6, 1e6), st.floats(0, 1e-3),
)
def test_error_propagation(a, ea, b, eb):
    x, y = SeriesValue(a, ea), SeriesValue(b, eb)
    s = x + y
    assert s.abs_error >= ea + eb
    p = x * y
    assert p.abs_error >= abs(a) * eb + abs(b) * ea + ea * eb
    # the true product of any values inside the bounds stays inside the bound
    for da in (-ea, ea):
        for db in (-eb, eb):
            exact = (Fraction(a) + Fraction(da)) * (Fraction(b) + Fraction(db))
            assert abs(exact - Fraction(p.value)) <= Fraction(p.abs_error)


def test_compensated_sum_beats_naive():
    xs = [1.0, 1e100, 1.0, -1e100] * 1000
    assert compensated_sum(xs) == 2000.0


def test_sum_values_orders_and_bounds():
    vals = [SeriesValue(0.1, 1e-16)] * 10
    s = sum_values(vals)
    assert abs(s.value - 1.0) <= s.abs_error


def test_frac_distance():
    assert frac_distance(3.25) == 0.25
    assert frac_distance(-2.75) == 0.25
    assert frac_distance(EXT.mpf(10) + EXT.mpf("1e-30")) == pytest.approx(1e-30)
    assert math.isclose(frac_distance(5.5), 0.5)
