from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from algpoints.powers import PowerProduct, iroot

positive_fracs = st.fractions(min_value=Fraction(1, 30), max_value=100, max_denominator=30)
exponents = st.fractions(min_value=-3, max_value=3, max_denominator=6)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10 ** 40), st.integers(1, 7))
def test_iroot_is_floor_root(x, k):
    r = iroot(x, k)
    assert r ** k <= x < (r + 1) ** k


def test_iroot_rejects_negative():
    with pytest.raises(ValueError):
        iroot(-1, 2)


def test_perfect_powers_collapse_to_rationals():
    assert PowerProduct.power(4, Fraction(1, 2)).is_rational
    assert PowerProduct.power(4, Fraction(1, 2)).rational() == 2
    assert PowerProduct.power(Fraction(8, 27), Fraction(2, 3)).rational() == Fraction(4, 9)
    assert not PowerProduct.power(2, Fraction(1, 2)).is_rational


def test_compare_sqrt_two():
    r2 = PowerProduct.power(2, Fraction(1, 2))
    assert r2.compare(Fraction(14142, 10000)) < 0
    assert r2.compare(Fraction(14143, 10000)) > 0
    assert r2 < Fraction(3, 2) and r2 > Fraction(7, 5)


@settings(max_examples=200, deadline=None)
@given(positive_fracs, exponents, positive_fracs, exponents, positive_fracs)
def test_bounds_and_compare_match_high_precision(b1, e1, b2, e2, coef):
    mpmath.mp.dps = 80
    v = PowerProduct(coef, ((b1, e1), (b2, e2)))
    ref = mpmath.mpf(coef.numerator) / coef.denominator
    ref *= mpmath.power(mpmath.mpf(b1.numerator) / b1.denominator, mpmath.mpf(e1.numerator) / e1.denominator)
    ref *= mpmath.power(mpmath.mpf(b2.numerator) / b2.denominator, mpmath.mpf(e2.numerator) / e2.denominator)
    lo, hi = v.bounds(64)
    assert mpmath.mpf(lo.numerator) / lo.denominator <= ref * (1 + mpmath.mpf(10) ** -60)
    assert mpmath.mpf(hi.numerator) / hi.denominator >= ref * (1 - mpmath.mpf(10) ** -60)
    assert hi - lo <= hi * Fraction(1, 2 ** 60)
    # compare against rationals on either side of the reference value
    below = Fraction(str(mpmath.nstr(ref * (1 - mpmath.mpf(10) ** -12), 30)))
    above = Fraction(str(mpmath.nstr(ref * (1 + mpmath.mpf(10) ** -12), 30)))
    assert v.compare(below) < 0 < v.compare(above)


@settings(max_examples=100, deadline=None)
@given(positive_fracs, exponents, positive_fracs, exponents)
def test_product_and_quotient_round_trip(b1, e1, b2, e2):
    a = PowerProduct.power(b1, e1)
    b = PowerProduct.power(b2, e2, 3)
    assert (a * b) / b == a
    assert (a * b).compare(0) < 0  # sign(x - value)


def test_zero_coefficient():
    z = PowerProduct(0, ((2, Fraction(1, 2)),))
    assert z.compare(0) == 0 and z.compare(Fraction(1, 10 ** 9)) > 0


def test_rejects_negative_inputs():
    with pytest.raises(ValueError):
        PowerProduct(-1)
    with pytest.raises(ValueError):
        PowerProduct(1, ((-2, Fraction(1, 2)),))
