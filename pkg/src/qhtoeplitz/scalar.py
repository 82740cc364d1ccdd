"""Dual-path numbers: exact elements of Q(i)[ln 2] or plain complex floats.

An exact scalar is a polynomial in a formal symbol ``λ`` (standing for ln 2)
with Gaussian-rational coefficients.  Since ln 2 is transcendental, such a
polynomial is zero as a real number only when every coefficient vanishes, so
nonzero tests on the exact path are decisions, not numerical guesses.

Mixing an exact scalar with a float demotes the result to float; the
``exact`` attribute records which path a value came from.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Complex, Rational
from typing import Union

LN2 = math.log(2.0)

_Q0 = Fraction(0)
_Q1 = Fraction(1)

# A Gaussian rational is stored as a (real, imag) pair of Fractions.
GQ = tuple


def _gq_add(x, y):
    return (x[0] + y[0], x[1] + y[1])


def _gq_sub(x, y):
    return (x[0] - y[0], x[1] - y[1])


def _gq_mul(x, y):
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _gq_inv(x):
    d = x[0] * x[0] + x[1] * x[1]
    return (x[0] / d, -x[1] / d)


def _gq_nonzero(x) -> bool:
    return bool(x[0]) or bool(x[1])


def _trim(coeffs) -> tuple:
    coeffs = list(coeffs)
    while coeffs and not _gq_nonzero(coeffs[-1]):
        coeffs.pop()
    return tuple(coeffs)


ScalarLike = Union["Scalar", int, Fraction, float, complex]


class Scalar:
    """A number on either the exact path (Q(i)[ln 2]) or the float path."""

    __slots__ = ("_poly", "_num")

    def __init__(self, value: ScalarLike = 0):
        if isinstance(value, Scalar):
            self._poly, self._num = value._poly, value._num
        elif isinstance(value, (int, Fraction)) and not isinstance(value, bool):
            self._poly = _trim([(Fraction(value), _Q0)])
            self._num = None
        elif isinstance(value, bool):
            self._poly = _trim([(Fraction(int(value)), _Q0)])
            self._num = None
        elif isinstance(value, Rational):
            self._poly = _trim([(Fraction(value.numerator, value.denominator), _Q0)])
            self._num = None
        elif isinstance(value, Complex):
            self._poly = None
            self._num = complex(value)
        else:
            raise TypeError(f"cannot build a Scalar from {type(value).__name__}")

    # -- constructors -------------------------------------------------------

    @classmethod
    def _from_poly(cls, coeffs) -> "Scalar":
        s = cls.__new__(cls)
        s._poly = _trim(coeffs)
        s._num = None
        return s

    @classmethod
    def exact(cls, re_part=0, im_part=0, ln2_power: int = 0) -> "Scalar":
        """``(re + i*im) * ln2**ln2_power`` on the exact path."""
        coeffs = [(_Q0, _Q0)] * ln2_power + [(Fraction(re_part), Fraction(im_part))]
        return cls._from_poly(coeffs)

    @classmethod
    def ln2(cls) -> "Scalar":
        return cls.exact(1, 0, 1)

    @classmethod
    def i(cls) -> "Scalar":
        return cls.exact(0, 1)

    @classmethod
    def float_(cls, value: complex) -> "Scalar":
        s = cls.__new__(cls)
        s._poly = None
        s._num = complex(value)
        return s

    # -- inspection ---------------------------------------------------------

    @property
    def exact_path(self) -> bool:
        return self._poly is not None

    @property
    def coefficients(self) -> tuple:
        """Coefficients ``((re, im), ...)`` by ascending power of ln 2."""
        if self._poly is None:
            raise ValueError("float scalar has no exact coefficients")
        return self._poly

    @property
    def degree(self) -> int:
        """Degree in ln 2 (-1 for zero); float scalars report 0."""
        if self._poly is None:
            return 0
        return len(self._poly) - 1

    def is_zero(self) -> bool:
        if self._poly is not None:
            return not self._poly
        return self._num == 0

    def is_unit(self) -> bool:
        """Invertible without leaving the exact ring: a nonzero constant."""
        return self._poly is not None and len(self._poly) == 1

    def is_rational(self) -> bool:
        return self._poly is not None and len(self._poly) <= 1 and (
            not self._poly or self._poly[0][1] == 0)

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self._poly[0][0] if self._poly else _Q0

    def __complex__(self) -> complex:
        if self._poly is None:
            return self._num
        acc = 0j
        for coeff in reversed(self._poly):
            acc = acc * LN2 + complex(float(coeff[0]), float(coeff[1]))
        return acc

    def __float__(self) -> float:
        c = complex(self)
        if c.imag != 0:
            raise TypeError(f"{self} is not real")
        return c.real

    def __abs__(self) -> float:
        return abs(complex(self))

    @property
    def real(self) -> "Scalar":
        if self._poly is None:
            return Scalar.float_(self._num.real)
        return Scalar._from_poly([(c[0], _Q0) for c in self._poly])

    @property
    def imag(self) -> "Scalar":
        if self._poly is None:
            return Scalar.float_(self._num.imag)
        return Scalar._from_poly([(c[1], _Q0) for c in self._poly])

    def conjugate(self) -> "Scalar":
        if self._poly is None:
            return Scalar.float_(self._num.conjugate())
        return Scalar._from_poly([(c[0], -c[1]) for c in self._poly])

    def to_float(self) -> "Scalar":
        return Scalar.float_(complex(self))

    @property
    def form(self) -> str:
        """``rational``, ``rational+q*ln2`` or ``float``."""
        if self._poly is None:
            return "float"
        return "rational" if len(self._poly) <= 1 else "rational+q*ln2"

    # -- arithmetic ---------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "Scalar":
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, float, complex, Fraction, Rational, Complex)):
            return Scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self._poly is None or other._poly is None:
            return Scalar.float_(complex(self) + complex(other))
        a, b = self._poly, other._poly
        n = max(len(a), len(b))
        zero = (_Q0, _Q0)
        return Scalar._from_poly(
            [_gq_add(a[k] if k < len(a) else zero, b[k] if k < len(b) else zero)
             for k in range(n)])

    __radd__ = __add__

    def __neg__(self):
        if self._poly is None:
            return Scalar.float_(-self._num)
        return Scalar._from_poly([(-c[0], -c[1]) for c in self._poly])

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self._poly is None or other._poly is None:
            return Scalar.float_(complex(self) * complex(other))
        a, b = self._poly, other._poly
        if not a or not b:
            return Scalar._from_poly(())
        out = [(_Q0, _Q0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not _gq_nonzero(x):
                continue
            for j, y in enumerate(b):
                out[i + j] = _gq_add(out[i + j], _gq_mul(x, y))
        return Scalar._from_poly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise ZeroDivisionError("division by an exactly zero Scalar")
        if self._poly is not None and other.is_unit():
            inv = _gq_inv(other._poly[0])
            return Scalar._from_poly([_gq_mul(c, inv) for c in self._poly])
        # Q(i)[ln 2] is not a field; anything else leaves the exact ring.
        return Scalar.float_(complex(self) / complex(other))

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            raise TypeError("Scalar powers must be integers")
        if exponent < 0:
            return Scalar(1) / (self ** (-exponent))
        result = Scalar(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        if self._poly is not None and other._poly is not None:
            return self._poly == other._poly
        return complex(self) == complex(other)

    def __hash__(self) -> int:
        if self._poly is not None:
            if len(self._poly) <= 1 and (not self._poly or self._poly[0][1] == 0):
                return hash(self._poly[0][0] if self._poly else 0)
            return hash(self._poly)
        return hash(self._num)

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- text ---------------------------------------------------------------

    def to_text(self) -> str:
        """Exact: ``p/q``, ``p/q+s/t*ln2``, ``1/2*i`` ...; float: 17 digits."""
        if self._poly is None:
            return format_float(self._num)
        if not self._poly:
            return "0/1"
        parts = []
        for power, (re_c, im_c) in enumerate(self._poly):
            suffix = "" if power == 0 else ("*ln2" if power == 1 else f"*ln2^{power}")
            for value, unit in ((re_c, ""), (im_c, "*i")):
                if value == 0:
                    continue
                sign = "-" if value < 0 else "+"
                v = abs(value)
                parts.append(f"{sign}{v.numerator}/{v.denominator}{unit}{suffix}")
        text = "".join(parts)
        return text[1:] if text.startswith("+") else text

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"Scalar({self.to_text()!r})"


def format_float(value: complex) -> str:
    """Decimal with 17 significant digits (complex as ``a+bj``)."""
    value = complex(value)
    if value.imag == 0:
        return format(value.real, ".17g")
    return f"{value.real:.17g}{value.imag:+.17g}j"


_EXACT_TERM = re.compile(
    r"([+-]?)(\d+)(?:/(\d+))?(\*i)?(?:\*ln2(?:\^(\d+))?)?")


def parse_scalar(text: str) -> Scalar:
    """Inverse of :meth:`Scalar.to_text`; plain integers and decimals accepted."""
    text = text.strip().replace(" ", "")
    if not text:
        raise ValueError("empty scalar")
    pos = 0
    acc = Scalar(0)
    exact_ok = True
    while pos < len(text):
        m = _EXACT_TERM.match(text, pos)
        if not m or m.end() == pos:
            exact_ok = False
            break
        if pos > 0 and not m.group(1):
            exact_ok = False
            break
        sign = -1 if m.group(1) == "-" else 1
        value = Fraction(int(m.group(2)), int(m.group(3) or 1)) * sign
        power = int(m.group(5)) if m.group(5) else (1 if "ln2" in m.group(0) else 0)
        if m.group(4):
            acc = acc + Scalar.exact(0, value, power)
        else:
            acc = acc + Scalar.exact(value, 0, power)
        pos = m.end()
    if exact_ok:
        return acc
    try:
        if text.endswith("j"):
            return Scalar.float_(complex(text))
        return Scalar.float_(float(text))
    except ValueError:
        raise ValueError(f"malformed scalar {text!r}") from None


def as_scalar(value: ScalarLike) -> Scalar:
    return value if isinstance(value, Scalar) else Scalar(value)
