"""Closed algebra of radial functions on (0, 1].

Three term kinds cover every radial expression needed here::

    MONLOG   c * r**a * (ln r)**b
    INV1P    c * r**a / (1 + r**2)
    LOG1P    c * r**a * ln(1 + r**2)

Exponents are exact rationals and coefficients are :class:`Scalar` values,
so normal-form merging is by exact key equality.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np
from scipy import integrate

from .scalar import Scalar, ScalarLike, as_scalar, parse_scalar


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class UnsupportedIntegral(ValueError):
    """An antiderivative would leave the three-kind term algebra."""


class Kind(enum.Enum):
    MONLOG = "MONLOG"
    INV1P = "INV1P"
    LOG1P = "LOG1P"


_KIND_ORDER = {Kind.MONLOG: 0, Kind.INV1P: 1, Kind.LOG1P: 2}


@dataclass(frozen=True)
class RadialTerm:
    kind: Kind
    coeff: Scalar
    a: Fraction
    b: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeff", as_scalar(self.coeff))
        object.__setattr__(self, "a", Fraction(self.a))
        if self.b < 0:
            raise DomainError("log power must be non-negative")
        if self.kind is not Kind.MONLOG and self.b != 0:
            raise DomainError(f"{self.kind.value} terms carry no log power")

    @property
    def key(self) -> tuple:
        return (_KIND_ORDER[self.kind], self.a, self.b)

    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        a = float(self.a)
        c = complex(self.coeff)
        c = c.real if c.imag == 0 else c
        if self.kind is Kind.MONLOG:
            base = r ** a
            if self.b:
                base = base * np.log(r) ** self.b
        elif self.kind is Kind.INV1P:
            base = r ** a / (1.0 + r * r)
        else:
            base = r ** a * np.log1p(r * r)
        return c * base

    def to_text(self) -> str:
        a = self.a
        return f"{self.kind.value} {self.coeff.to_text()} {a.numerator}/{a.denominator} {self.b}"


class RadialFunction:
    """Finite sum of radial terms, kept in normal form.

    At most one term per ``(kind, a, b)`` and no zero coefficients.  The empty
    sum is the zero function.  Instances are immutable and hashable.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Iterable[RadialTerm] = ()):
        merged: dict = {}
        for t in terms:
            k = (t.kind, t.a, t.b)
            merged[k] = merged[k] + t.coeff if k in merged else t.coeff
        out = [RadialTerm(kind, c, a, b) for (kind, a, b), c in merged.items()
               if not c.is_zero()]
        out.sort(key=lambda t: t.key)
        self._terms = tuple(out)
        self._hash = None

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls) -> "RadialFunction":
        return cls(())

    @classmethod
    def monomial(cls, a, coeff: ScalarLike = 1, logpow: int = 0) -> "RadialFunction":
        return cls([RadialTerm(Kind.MONLOG, as_scalar(coeff), Fraction(a), logpow)])

    @classmethod
    def inv1p(cls, a, coeff: ScalarLike = 1) -> "RadialFunction":
        return cls([RadialTerm(Kind.INV1P, as_scalar(coeff), Fraction(a))])

    @classmethod
    def log1p(cls, a, coeff: ScalarLike = 1) -> "RadialFunction":
        return cls([RadialTerm(Kind.LOG1P, as_scalar(coeff), Fraction(a))])

    @classmethod
    def constant(cls, c: ScalarLike) -> "RadialFunction":
        return cls.monomial(0, c)

    # -- container protocol ---------------------------------------------------

    @property
    def terms(self) -> tuple:
        return self._terms

    def __iter__(self):
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def exact(self) -> bool:
        return all(t.coeff.exact_path for t in self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RadialFunction):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple((t.kind, t.a, t.b, t.coeff) for t in self._terms))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(t.to_text() for t in self._terms) or "0"
        return f"RadialFunction({body})"

    # -- algebra --------------------------------------------------------------

    def __add__(self, other: "RadialFunction") -> "RadialFunction":
        if not isinstance(other, RadialFunction):
            return NotImplemented
        return RadialFunction(self._terms + other._terms)

    def __neg__(self) -> "RadialFunction":
        return self.scale(-1)

    def __sub__(self, other: "RadialFunction") -> "RadialFunction":
        if not isinstance(other, RadialFunction):
            return NotImplemented
        return self + (-other)

    def scale(self, c: ScalarLike) -> "RadialFunction":
        c = as_scalar(c)
        return RadialFunction(RadialTerm(t.kind, t.coeff * c, t.a, t.b) for t in self._terms)

    def __mul__(self, c):
        if isinstance(c, RadialFunction):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def mul_monomial(self, m) -> "RadialFunction":
        """Multiply by ``r**m``."""
        m = Fraction(m)
        return RadialFunction(RadialTerm(t.kind, t.coeff, t.a + m, t.b) for t in self._terms)

    def conjugate(self) -> "RadialFunction":
        return RadialFunction(
            RadialTerm(t.kind, t.coeff.conjugate(), t.a, t.b) for t in self._terms)

    def to_float(self) -> "RadialFunction":
        return RadialFunction(
            RadialTerm(t.kind, t.coeff.to_float(), t.a, t.b) for t in self._terms)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        total = np.zeros_like(r, dtype=complex)
        for t in self._terms:
            total = total + t.evaluate(r)
        if np.all(total.imag == 0):
            total = total.real
        return total if total.ndim else total[()]

    # -- serialization --------------------------------------------------------

    def to_text(self) -> str:
        return "".join(t.to_text() + "\n" for t in self._terms)

    @classmethod
    def from_text(cls, text: str) -> "RadialFunction":
        terms = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            terms.append(parse_term(line, lineno))
        return cls(terms)


def parse_term(line: str, lineno: int = 0) -> RadialTerm:
    fields = line.split()
    if len(fields) not in (3, 4):
        raise ValueError(f"line {lineno}: expected 'kind coeff a b', got {line!r}")
    try:
        kind = Kind(fields[0].upper())
    except ValueError:
        raise ValueError(f"line {lineno}: unknown term kind {fields[0]!r}") from None
    coeff = parse_scalar(fields[1])
    try:
        a = Fraction(fields[2])
        b = int(fields[3]) if len(fields) == 4 else 0
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"line {lineno}: bad exponent in {line!r}") from None
    return RadialTerm(kind, coeff, a, b)


@dataclass(frozen=True)
class GeometricRatioSpec:
    """``coeff * r**p * (1 - r**q) / (1 - r**4)`` with ``q`` even."""

    coeff: Scalar
    p: int
    q: int


def reduce_geometric(spec: GeometricRatioSpec) -> RadialFunction:
    """Rewrite a geometric ratio as monomials plus at most one 1/(1+r^2) term."""
    q = spec.q
    if q < 2 or q % 2:
        raise DomainError(f"q must be a positive even integer, got {q}")
    # (1 - u**m) / (1 - u**2) with u = r**2, m = q/2; numerator/(1-u) = sum u**j,
    # then divide that polynomial by (1 + u).
    m = q // 2
    poly = [Fraction(1)] * m
    quotient = [Fraction(0)] * max(m - 1, 0)
    for deg in range(m - 1, 0, -1):
        lead = poly[deg]
        quotient[deg - 1] = lead
        poly[deg] -= lead
        poly[deg - 1] -= lead
    remainder = poly[0]
    c = as_scalar(spec.coeff)
    terms = [RadialTerm(Kind.MONLOG, c * qc, Fraction(spec.p + 2 * j), 0)
             for j, qc in enumerate(quotient) if qc]
    if remainder:
        terms.append(RadialTerm(Kind.INV1P, c * remainder, Fraction(spec.p)))
    return RadialFunction(terms)


# -- behaviour near r = 0 ---------------------------------------------------------

def singular_part(f: RadialFunction, cutoff, strict: bool = True) -> dict:
    """Collect the coefficients of ``r**e (ln r)**b`` near 0 with ``e < cutoff``.

    INV1P and LOG1P terms are expanded in their Taylor series in ``r**2``, so
    cancellations between kinds are seen.  With ``strict=False`` the bound is
    ``e <= cutoff``.  Returns ``{(e, b): Scalar}`` without zero entries.
    """
    cutoff = Fraction(cutoff)

    def below(e):
        return e < cutoff if strict else e <= cutoff

    out: dict = {}

    def add(key, c):
        out[key] = out[key] + c if key in out else c

    for t in f:
        if t.kind is Kind.MONLOG:
            if below(t.a):
                add((t.a, t.b), t.coeff)
        elif t.kind is Kind.INV1P:
            j = 0
            while below(t.a + 2 * j):
                add((t.a + 2 * j, 0), t.coeff * (-1) ** j)
                j += 1
        else:
            j = 1
            while below(t.a + 2 * j):
                add((t.a + 2 * j, 0), t.coeff * Fraction((-1) ** (j + 1), j))
                j += 1
    return {k: v for k, v in sorted(out.items()) if not v.is_zero()}


def l1_singular_part(f: RadialFunction) -> dict:
    """Obstructions to membership in L^1([0,1], r dr): exponents ``e <= -2``."""
    return singular_part(f, -2, strict=False)


def bounded_singular_part(f: RadialFunction) -> dict:
    """Obstructions to boundedness on (0,1): ``e < 0`` or ``e == 0`` with a log."""
    sp = singular_part(f, 0, strict=False)
    return {k: v for k, v in sp.items() if k[0] < 0 or k[1] > 0}


def l1_membership(f: RadialFunction) -> tuple:
    """``(True, norm)`` when ``f`` is in L^1([0,1], r dr), else ``(False, None)``."""
    if l1_singular_part(f):
        return False, None
    return True, l1_norm(f)


def l1_norm(f: RadialFunction) -> float:
    """∫_0^1 |f(r)| r dr by adaptive quadrature (assumes membership)."""
    if f.is_zero():
        return 0.0

    def integrand(r):
        return abs(complex(f(r))) * r

    # substitution r = s**2 softens algebraic behaviour at the origin
    val, _ = integrate.quad(lambda s: 2 * s * integrand(s * s), 0.0, 1.0,
                            limit=200, epsabs=1e-13, epsrel=1e-11)
    return val


# -- Mellin convolution with a monomial ----------------------------------------

def _split_inv1p(t: RadialTerm) -> list:
    """t^e/(1+t^2) with odd integer e -> monomials plus ±t/(1+t^2)."""
    e = t.a
    if e.denominator != 1 or e.numerator % 2 == 0:
        raise UnsupportedIntegral(
            f"antiderivative of r^{e}/(1+r^2) needs arctan or non-elementary terms")
    e = e.numerator
    c = t.coeff
    out = []
    sign = 1
    if e >= 1:
        # t^e/(1+t^2) = t^(e-2) - t^(e-2)/(1+t^2)
        while e > 1:
            out.append(RadialTerm(Kind.MONLOG, c * sign, Fraction(e - 2), 0))
            sign = -sign
            e -= 2
    else:
        # t^e/(1+t^2) = t^e - t^(e+2)/(1+t^2)
        while e < 1:
            out.append(RadialTerm(Kind.MONLOG, c * sign, Fraction(e), 0))
            sign = -sign
            e += 2
    out.append(RadialTerm(Kind.INV1P, c * sign, Fraction(1)))
    return out


def _antiderivative(t: RadialTerm) -> list:
    """Antiderivative of a single term as a list of terms (constant dropped)."""
    if t.kind is Kind.MONLOG:
        e, b = t.a, t.b
        if e == -1:
            return [RadialTerm(Kind.MONLOG, t.coeff / (b + 1), Fraction(0), b + 1)]
        # ∫ t^e (ln t)^b = t^(e+1) Σ_i (-1)^i b!/(b-i)! (ln t)^(b-i) / (e+1)^(i+1)
        out = []
        for i in range(b + 1):
            k = Fraction((-1) ** i * math.factorial(b), math.factorial(b - i)) / (e + 1) ** (i + 1)
            out.append(RadialTerm(Kind.MONLOG, t.coeff * k, e + 1, b - i))
        return out
    if t.kind is Kind.INV1P:
        out = []
        for piece in _split_inv1p(t):
            if piece.kind is Kind.INV1P:
                out.append(RadialTerm(Kind.LOG1P, piece.coeff / 2, Fraction(0)))
            else:
                out.extend(_antiderivative(piece))
        return out
    e = t.a
    if e == -1 or e.denominator != 1 or e.numerator % 2 == 0:
        raise UnsupportedIntegral(f"antiderivative of r^{e} ln(1+r^2) leaves the algebra")
    # by parts: t^(e+1)/(e+1) ln(1+t^2) - 2/(e+1) ∫ t^(e+2)/(1+t^2)
    head = RadialTerm(Kind.LOG1P, t.coeff / (e + 1), e + 1)
    rest = _antiderivative(RadialTerm(Kind.INV1P, -2 * t.coeff / (e + 1), e + 2))
    return [head] + rest


def _value_at_one(terms: Iterable[RadialTerm]) -> Scalar:
    total = Scalar(0)
    for t in terms:
        if t.kind is Kind.MONLOG:
            if t.b == 0:
                total = total + t.coeff
        elif t.kind is Kind.INV1P:
            total = total + t.coeff / 2
        else:
            total = total + t.coeff * Scalar.ln2()
    return total


def convolve_monomial(m, g: RadialFunction) -> RadialFunction:
    """Mellin convolution ``(r**m *_M g)(r) = r**m ∫_r^1 t**(-m-1) g(t) dt``.

    Raises :class:`UnsupportedIntegral` when an antiderivative would need
    arctan (even powers over 1+t^2) or a dilogarithm.
    """
    m = Fraction(m)
    integrand = g.mul_monomial(-m - 1)
    anti = RadialFunction(sum((_antiderivative(t) for t in integrand), []))
    at_one = _value_at_one(anti)
    return (RadialFunction.constant(at_one) - anti).mul_monomial(m)


def convolve(f: RadialFunction, g: RadialFunction) -> RadialFunction:
    """Symbolic Mellin convolution when one factor is a sum of plain monomials."""
    def plain(h):
        return all(t.kind is Kind.MONLOG and t.b == 0 for t in h)

    if not plain(f):
        if not plain(g):
            raise UnsupportedIntegral("neither factor is a sum of monomials")
        f, g = g, f
    out = RadialFunction.zero()
    for t in f:
        out = out + convolve_monomial(t.a, g).scale(t.coeff)
    return out
