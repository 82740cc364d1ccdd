"""Mellin transforms ``φ̂(z) = ∫_0^1 φ(r) r^(z-1) dr`` on the term algebra.

Two independent routes are provided: :func:`mellin_eval` uses closed forms
(exact in Q[ln 2] at suitable rational arguments) and :func:`mellin_quadrature`
integrates numerically.  The remaining helpers give finite, checkable
consequences of Mellin injectivity and of the periodicity argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import integrate

from .radial import (DomainError, Kind, RadialFunction, RadialTerm,
                     UnsupportedIntegral, convolve)
from .scalar import Scalar, as_scalar, format_float


class DivergenceError(ValueError):
    """The defining integral does not converge."""


class Residual(NamedTuple):
    value: float
    exact_zero: bool


@dataclass(frozen=True)
class MellinValue:
    value: Scalar
    exact: bool
    domain_ok: bool = True

    def __complex__(self) -> complex:
        return complex(self.value)

    def to_text(self) -> str:
        form = self.value.form if self.exact else "float"
        return (f"value={format_float(complex(self.value))} "
                f"exact={'true' if self.exact else 'false'} form={form}")


def _exact_argument(z) -> Fraction | None:
    if isinstance(z, bool):
        return None
    if isinstance(z, (int, Fraction)):
        return Fraction(z)
    if isinstance(z, Scalar) and z.is_rational():
        return z.as_fraction()
    return None


# -- the 1/(1+r^2) moment -------------------------------------------------------

def alternating_sum(terms: Callable[[int], complex], n: int = 40) -> complex:
    """Σ_{k≥0} (-1)^k a_k with Cohen-Rodriguez Villegas-Zagier acceleration.

    Valid when ``a_k`` is a moment sequence ``∫_0^1 x^k w(x) dx``; the error
    then decays like ``5.83**-n``.
    """
    d = (3.0 + math.sqrt(8.0)) ** n
    d = (d + 1.0 / d) / 2.0
    b = -1.0
    c = -d
    s = 0j
    for k in range(n):
        c = b - c
        s += c * terms(k)
        b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1.0))
    return s / d


def inv1p_moment(s) -> complex:
    """∫_0^1 r^(s-1)/(1+r^2) dr = Σ_j (-1)^j/(s+2j) for Re s > 0 (float)."""
    s = complex(s)
    return alternating_sum(lambda j: 1.0 / (s + 2 * j))


@lru_cache(maxsize=None)
def _inv1p_even_exact(s: int) -> Scalar:
    if s == 2:
        return Scalar.ln2() / 2
    return Scalar(Fraction(1, s - 2)) - _inv1p_even_exact(s - 2)


def inv1p_moment_exact(s: Fraction) -> Scalar | None:
    """Exact value in Q + Q ln2 when ``s`` is a positive even integer, else None.

    Odd integers bring in π/4 and are left to the float path.
    """
    if s.denominator == 1 and s > 0 and s.numerator % 2 == 0:
        return _inv1p_even_exact(int(s))
    return None


# -- closed-form evaluator -------------------------------------------------------

def _term_mellin(t: RadialTerm, z, zq: Fraction | None) -> tuple:
    s_exact = zq + t.a if zq is not None else None
    s = complex(z) + float(t.a) if zq is None else complex(float(s_exact))
    if s.real <= 0:
        raise DomainError(
            f"Mellin argument outside the half-plane of term {t.to_text()!r}: "
            f"Re(z) + a = {s.real:g} <= 0")
    c = t.coeff
    if t.kind is Kind.MONLOG:
        k = Fraction((-1) ** t.b * math.factorial(t.b))
        if s_exact is not None:
            return c * (k / s_exact ** (t.b + 1)), c.exact_path
        return c * Scalar.float_(float(k) / s ** (t.b + 1)), False
    if t.kind is Kind.INV1P:
        if s_exact is not None:
            v = inv1p_moment_exact(s_exact)
            if v is not None:
                return c * v, c.exact_path
        return c * Scalar.float_(inv1p_moment(s)), False
    # ∫ r^(s-1) ln(1+r^2) = ln2/s - (2/s) ∫ r^(s+1)/(1+r^2)
    if s_exact is not None:
        v = inv1p_moment_exact(s_exact + 2)
        if v is not None:
            return c * ((Scalar.ln2() - 2 * v) / s_exact), c.exact_path
    return c * Scalar.float_((math.log(2.0) - 2.0 * inv1p_moment(s + 2)) / s), False


def mellin_eval(f: RadialFunction, z) -> MellinValue:
    """Closed-form Mellin transform of ``f`` at ``z``.

    The transform is taken per term on its own half-plane ``Re(z) + a > 0``.
    Exact output requires a rational ``z`` and, for the 1/(1+r^2) kinds, an
    even integer shifted argument.
    """
    zq = _exact_argument(z)
    if zq is None:
        z = complex(z)
    total = Scalar(0)
    exact = True
    for t in f:
        v, ex = _term_mellin(t, z, zq)
        total = total + v
        exact = exact and ex
    if not exact:
        total = total.to_float()
    return MellinValue(total, exact and total.exact_path)


# -- quadrature oracle -------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def _gl(g, a: float, b: float) -> complex:
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    return half * complex(np.sum(_GL_W * g(mid + half * _GL_X)))


def _adaptive(g, a: float, b: float, tol: float, depth: int = 0) -> tuple:
    whole = _gl(g, a, b)
    m = 0.5 * (a + b)
    left, right = _gl(g, a, m), _gl(g, m, b)
    err = abs(left + right - whole)
    # roundoff floor keeps halved tolerances from chasing noise
    if err <= max(tol, 1e-15 * abs(left + right)) or depth >= 16:
        return left + right, err
    lv, le = _adaptive(g, a, m, tol / 2, depth + 1)
    rv, re_ = _adaptive(g, m, b, tol / 2, depth + 1)
    return lv + rv, le + re_


def mellin_quadrature(f: Callable, z, tol: float = 1e-12) -> MellinValue:
    """∫_0^1 f(r) r^(z-1) dr by graded adaptive Gauss-Legendre quadrature.

    Works in ``u = -ln r``, so the algebraic behaviour at r = 0 becomes
    exponential decay on a half-line cut into panels of doubling width, and
    the neighbourhood of r = 1 is cut into panels shrinking geometrically
    toward ``u = 0``.  Raises :class:`DivergenceError` when the integrand
    stops decaying on the half-line.
    """
    z = complex(z)

    def g(u):
        u = np.asarray(u, dtype=float)
        with np.errstate(all="ignore"):
            vals = np.asarray(f(np.exp(-u)), dtype=complex) * np.exp(-u * z)
        return vals

    panel_tol = tol * 1e-2
    total = 0j
    err = 0.0
    ln2 = math.log(2.0)
    # toward r = 1
    edges = [ln2 * 2.0 ** -k for k in range(41)] + [0.0]
    for hi, lo in zip(edges[:-1], edges[1:]):
        v, e = _adaptive(g, lo, hi, panel_tol)
        total += v
        err += e
    # toward r = 0
    u = ln2
    width = ln2
    prev = abs(g(np.array([u]))[0])
    stalls = 0
    while True:
        v, e = _adaptive(g, u, u + width, panel_tol)
        if not np.isfinite(v):
            raise DivergenceError(f"integrand not finite near r = 0 for z = {z}")
        total += v
        err += e
        u += width
        cur = abs(g(np.array([u]))[0])
        if not np.isfinite(cur):
            raise DivergenceError(f"integrand blows up near r = 0 for z = {z}")
        stalls = stalls + 1 if cur >= prev else 0
        if stalls >= 3 and u > 20:
            raise DivergenceError(f"integrand does not decay near r = 0 for z = {z}")
        if cur == 0.0:
            break
        if cur < prev:
            # tail beyond u, assuming the decay rate seen on the last panel
            rate = math.log(prev / cur) / width
            if cur / rate < panel_tol and abs(v) < tol:
                break
        if u > 700:
            raise DivergenceError(f"no convergence before r underflows for z = {z}")
        prev = cur
        width *= 2 if width < 8 else 1
    if err > tol:
        raise DivergenceError(f"error estimate {err:.3g} exceeds tolerance {tol:.3g}")
    value = total.real if total.imag == 0 else total
    return MellinValue(Scalar.float_(value), False)


# -- convolution identity ------------------------------------------------------------

def numeric_convolution(f: Callable, g: Callable) -> Callable:
    """Pointwise ``(f *_M g)(r) = ∫_r^1 f(r/t) g(t) dt/t`` by quadrature."""
    def h(r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.empty(r.shape, dtype=complex)
        for i, x in enumerate(r.flat):
            if x >= 1.0:
                out.flat[i] = 0.0
                continue

            def integrand(t, part):
                v = complex(f(x / t)) * complex(g(t)) / t
                return v.real if part == 0 else v.imag

            re_, _ = integrate.quad(integrand, x, 1.0, args=(0,), limit=200)
            im_, _ = integrate.quad(integrand, x, 1.0, args=(1,), limit=200)
            out.flat[i] = re_ + 1j * im_
        return out
    return h


def convolution_identity_check(f: RadialFunction, g: RadialFunction,
                               zs: Sequence, tol: float = 1e-10) -> Residual:
    """max_z |M(f *_M g)(z) - M f(z) M g(z)|; exact zero on the exact path."""
    if f.is_zero() or g.is_zero():
        return Residual(0.0, True)
    try:
        conv = convolve(f, g)
        conv_mellin = lambda z: mellin_eval(conv, z)
    except UnsupportedIntegral:
        h = numeric_convolution(f, g)
        conv_mellin = lambda z: mellin_quadrature(h, z, tol=tol * 1e-2)
    worst = 0.0
    exact_zero = True
    for z in zs:
        lhs = conv_mellin(z).value
        rhs = mellin_eval(f, z).value * mellin_eval(g, z).value
        diff = lhs - rhs
        if not (diff.exact_path and diff.is_zero()):
            exact_zero = False
        worst = max(worst, abs(diff))
    return Residual(worst, exact_zero)


# -- finite injectivity proxy ------------------------------------------------------

@dataclass(frozen=True)
class CauchyCertificate:
    matrix: tuple
    determinant: Fraction
    nonsingular: bool


def exact_determinant(rows) -> Fraction:
    """Determinant by Gaussian elimination over Q (first nonzero pivot)."""
    a = [list(map(Fraction, row)) for row in rows]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for r in range(col + 1, n):
            factor = a[r][col] / p
            if factor:
                for c in range(col, n):
                    a[r][c] -= factor * a[col][c]
    return det


def vandermonde_null_test(exponents: Sequence, nodes: Sequence) -> CauchyCertificate:
    """Certify that Σ c_j r^(a_j) vanishing in Mellin at the nodes is zero.

    Builds the Cauchy matrix ``[1/(z_i + a_j)]`` and returns its exact
    determinant; a nonzero determinant forces every ``c_j = 0``.
    """
    a = [Fraction(x) for x in exponents]
    zs = [Fraction(x) for x in nodes]
    if len(a) != len(zs):
        raise DomainError("need as many nodes as exponents")
    if len(set(a)) != len(a):
        raise DomainError("repeated exponents")
    if len(set(zs)) != len(zs):
        raise DomainError("repeated nodes")
    if any(x <= -2 for x in a):
        raise DomainError("exponents must exceed -2")
    if any(z < 2 for z in zs):
        raise DomainError("nodes must satisfy Re z >= 2")
    if len(zs) > 2 and len({zs[i + 1] - zs[i] for i in range(len(zs) - 1)}) != 1:
        raise DomainError("nodes must form an arithmetic progression")
    m = tuple(tuple(1 / (z + x) for x in a) for z in zs)
    det = exact_determinant(m)
    return CauchyCertificate(m, det, det != 0)


# -- constant offset on a ladder ------------------------------------------------------

@dataclass(frozen=True)
class OffsetFit:
    constant: Scalar
    deviation: float
    exact: bool


def fit_constant_offset(F: Callable, G: Callable, z0, p, count: int) -> OffsetFit:
    """Least-squares constant ``c`` with ``F ≈ G + c`` on ``z0 + p*j``, j < count."""
    diffs = []
    for j in range(count):
        z = z0 + p * j
        diffs.append(as_scalar(F(z)) - as_scalar(G(z)))
    c = sum(diffs, Scalar(0)) / len(diffs)
    exact = c.exact_path
    dev_vals = [d - c for d in diffs]
    if exact and all(d.is_zero() for d in dev_vals):
        return OffsetFit(c, 0.0, True)
    return OffsetFit(c, max(abs(d) for d in dev_vals), exact)
