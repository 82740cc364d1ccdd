import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qhtoeplitz.scalar import LN2, Scalar, format_float, parse_scalar

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=40)


@st.composite
def exact_scalars(draw):
    s = Scalar(0)
    for power in range(draw(st.integers(0, 2)) + 1):
        s = s + Scalar.exact(draw(fractions), draw(fractions), power)
    return s


def test_ln2_value_and_form():
    x = Scalar.ln2() * 4 - Fraction(8, 3)
    assert x.exact_path
    assert x.form == "rational+q*ln2"
    assert float(x) == pytest.approx(4 * LN2 - 8 / 3, abs=1e-15)
    assert x.to_text() == "-8/3+4/1*ln2"


def test_nonzero_is_exact_even_when_numerically_tiny():
    # 1/1000000 * ln2 is small but a nonzero element of the ring
    x = Scalar.ln2() * Fraction(1, 10 ** 9)
    assert not x.is_zero()
    assert (Scalar.ln2() - Scalar.ln2()).is_zero()


def test_mixing_demotes_to_float():
    x = Scalar(Fraction(1, 3)) + Scalar.float_(0.5)
    assert not x.exact_path
    assert x.form == "float"
    assert complex(x) == pytest.approx(1 / 3 + 0.5)


def test_gaussian_division():
    i = Scalar.i()
    assert (i * i) == Scalar(-1)
    assert (Scalar(1) / (Scalar(1) + i)) == Scalar.exact(Fraction(1, 2), Fraction(-1, 2))


def test_division_by_ln2_polynomial_demotes():
    # Q(i)[ln2] is not a field; 1/ln2 leaves the exact path
    q = Scalar(1) / Scalar.ln2()
    assert not q.exact_path
    assert abs(complex(q) - 1 / LN2) < 1e-15


def test_format_float_17_digits():
    assert format_float(1 / 6) == "0.16666666666666666"
    assert format_float(1 + 2j) == "1+2j"


@pytest.mark.parametrize("text", ["0/1", "1/2", "-8/3+4/1*ln2", "1/2*i", "3/1-1/5*i*ln2^2"])
def test_text_round_trip_examples(text):
    assert parse_scalar(text).to_text() == text


def test_parse_plain_forms():
    assert parse_scalar("7") == Scalar(7)
    assert not parse_scalar("0.25").exact_path
    assert complex(parse_scalar("1.5-2j")) == 1.5 - 2j
    with pytest.raises(ValueError):
        parse_scalar("abc")


@given(exact_scalars(), exact_scalars(), exact_scalars())
def test_ring_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    assert x - x == Scalar(0)


@given(exact_scalars())
def test_text_round_trip(x):
    assert parse_scalar(x.to_text()) == x


@given(exact_scalars(), exact_scalars())
def test_float_shadow_matches(x, y):
    exact = complex(x * y + x)
    approx = complex(x) * complex(y) + complex(x)
    assert abs(exact - approx) <= 1e-9 * max(1.0, abs(approx))


@given(exact_scalars())
def test_conjugate_is_involution(x):
    assert x.conjugate().conjugate() == x
    assert abs(complex(x.conjugate()) - complex(x).conjugate()) <= 1e-9 * max(1, abs(complex(x)))


def test_ln2_constant():
    assert LN2 == math.log(2)
