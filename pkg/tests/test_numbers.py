from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cralg.core.numbers import I, ONE, ZERO, GaussianRational, gr

fractions = st.fractions(max_denominator=50).filter(lambda f: abs(f) < 1000)
gaussians = st.builds(GaussianRational, fractions, fractions)


def test_reduced_form_and_sign():
    c = GaussianRational(Fraction(4, -6), Fraction(10, 4))
    assert c.re == Fraction(-2, 3) and c.im == Fraction(5, 2)
    assert c.re.denominator > 0


def test_report_format():
    assert str(GaussianRational(Fraction(1, 2), Fraction(-3, 4))) == "1/2-3/4*i"
    assert str(GaussianRational(0, 1)) == "1*i"
    assert str(GaussianRational(-7)) == "-7"


@pytest.mark.parametrize("text", ["1/2-3/4*i", "i", "-i", "5", "-2/3*i", "0"])
def test_parse_inverts_str(text):
    c = GaussianRational.parse(text)
    assert GaussianRational.parse(str(c)) == c


def test_parse_rejects_junk():
    with pytest.raises(ValueError):
        GaussianRational.parse("1.5")


def test_floats_refused():
    with pytest.raises(TypeError):
        gr(0.5)


def test_imaginary_unit():
    assert I * I == -ONE
    assert (ONE / I) == -I
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


@given(gaussians, gaussians)
def test_matches_python_complex_fractions(a, b):
    # oracle: componentwise Fraction arithmetic
    ar, ai, br, bi = Fraction(a.re), Fraction(a.im), Fraction(b.re), Fraction(b.im)
    prod = a * b
    assert (Fraction(prod.re), Fraction(prod.im)) == (ar * br - ai * bi, ar * bi + ai * br)
    s = a + b
    assert (Fraction(s.re), Fraction(s.im)) == (ar + br, ai + bi)
    if b:
        assert (a / b) * b == a


@given(gaussians)
def test_conjugate_is_involution(a):
    assert a.conjugate().conjugate() == a
    assert (a * a.conjugate()).is_real()


@given(gaussians, st.integers(min_value=-4, max_value=6))
def test_integer_powers(a, k):
    if not a and k < 0:
        return
    expected = ONE
    base = a if k >= 0 else a.inverse()
    for _ in range(abs(k)):
        expected = expected * base
    assert a ** k == expected
