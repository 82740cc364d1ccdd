"""Quasihomogeneous Toeplitz operators as weighted shifts on {z^n}.

For a symbol ``e^{ikθ} φ(r)`` the Bergman-space Toeplitz operator sends
``z^n`` to ``2(n+k+1) φ̂(2n+k+2) z^(n+k)``, and to zero when ``n + k < 0``.
A :class:`PolarSymbol` is a finite sum of such pieces; everything below is
built from that single weight formula.

Matrices use the unnormalized monomial basis: column ``n`` holds the
coefficients of ``T(z^n)``, row ``m`` the coefficient of ``z^m``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

from .mellin import mellin_eval
from .radial import DomainError, RadialFunction, l1_membership, parse_term
from .scalar import Scalar, ScalarLike


@dataclass(frozen=True)
class QuasiSymbol:
    """``e^{ikθ} φ(r)`` with ``φ`` in L^1([0,1], r dr)."""

    k: int
    radial: RadialFunction

    def __post_init__(self):
        ok, _ = l1_membership(self.radial)
        if not ok:
            raise DomainError(f"radial part of degree {self.k} is not in L^1(r dr)")

    @classmethod
    def unchecked(cls, k: int, radial: RadialFunction) -> "QuasiSymbol":
        obj = object.__new__(cls)
        object.__setattr__(obj, "k", k)
        object.__setattr__(obj, "radial", radial)
        return obj


@lru_cache(maxsize=200_000)
def weight(k: int, radial: RadialFunction, n: int) -> Scalar:
    """Coefficient of ``z^(n+k)`` in ``T_{e^{ikθ}φ}(z^n)``."""
    if n < 0:
        raise ValueError("basis index must be non-negative")
    if n + k < 0:
        return Scalar(0)
    if radial.is_zero():
        return Scalar(0)
    value = mellin_eval(radial, 2 * n + k + 2).value
    return value * (2 * (n + k + 1))


@dataclass(frozen=True)
class WeightedShift:
    k: int
    radial: RadialFunction

    def weight(self, n: int) -> Scalar:
        return weight(self.k, self.radial, n)

    def __call__(self, n: int) -> Scalar:
        return self.weight(n)


def shift_of(sym: QuasiSymbol) -> WeightedShift:
    return WeightedShift(sym.k, sym.radial)


class PolarSymbol:
    """Finite polar decomposition ``Σ_k e^{ikθ} f_k(r)``."""

    __slots__ = ("_parts",)

    def __init__(self, parts: Mapping[int, RadialFunction] | Iterable = ()):
        items = parts.items() if isinstance(parts, Mapping) else parts
        merged: dict = {}
        for k, f in items:
            k = int(k)
            merged[k] = merged[k] + f if k in merged else f
        self._parts = {k: merged[k] for k in sorted(merged) if not merged[k].is_zero()}

    @classmethod
    def zero(cls) -> "PolarSymbol":
        return cls({})

    @classmethod
    def monomial(cls, p: int, q: int, coeff: ScalarLike = 1) -> "PolarSymbol":
        """``coeff * z^p * conj(z)^q``."""
        return cls({p - q: RadialFunction.monomial(p + q, coeff)})

    @classmethod
    def constant(cls, c: ScalarLike) -> "PolarSymbol":
        return cls({0: RadialFunction.constant(c)})

    @classmethod
    def quasi(cls, k: int, radial: RadialFunction) -> "PolarSymbol":
        return cls({k: radial})

    @property
    def parts(self) -> dict:
        return dict(self._parts)

    @property
    def support(self) -> tuple:
        return tuple(self._parts)

    @property
    def reach(self) -> int:
        return max((abs(k) for k in self._parts), default=0)

    def __getitem__(self, k: int) -> RadialFunction:
        return self._parts.get(k, RadialFunction.zero())

    def is_zero(self) -> bool:
        return not self._parts

    @property
    def exact(self) -> bool:
        return all(f.exact for f in self._parts.values())

    def __add__(self, other: "PolarSymbol") -> "PolarSymbol":
        if not isinstance(other, PolarSymbol):
            return NotImplemented
        return PolarSymbol(list(self._parts.items()) + list(other._parts.items()))

    def __neg__(self) -> "PolarSymbol":
        return self.scale(-1)

    def __sub__(self, other: "PolarSymbol") -> "PolarSymbol":
        return self + (-other)

    def scale(self, c: ScalarLike) -> "PolarSymbol":
        return PolarSymbol({k: f.scale(c) for k, f in self._parts.items()})

    def __mul__(self, c):
        if isinstance(c, PolarSymbol):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def conjugate(self) -> "PolarSymbol":
        return PolarSymbol({-k: f.conjugate() for k, f in self._parts.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolarSymbol):
            return NotImplemented
        return self._parts == other._parts

    def __hash__(self) -> int:
        return hash(tuple(self._parts.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}: {f!r}" for k, f in self._parts.items())
        return f"PolarSymbol({{{inner}}})"

    def to_text(self) -> str:
        return "".join(f"degree {k}:\n{f.to_text()}" for k, f in self._parts.items())

    @classmethod
    def from_text(cls, text: str) -> "PolarSymbol":
        parts: list = []
        current = None
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.lower().startswith("degree"):
                head = line[len("degree"):].strip().rstrip(":").strip()
                try:
                    current = int(head)
                except ValueError:
                    raise ValueError(f"line {lineno}: bad degree header {line!r}") from None
                continue
            if current is None:
                raise ValueError(f"line {lineno}: term before any 'degree k:' header")
            parts.append((current, RadialFunction([parse_term(line, lineno)])))
        return cls(parts)


def apply(sym: PolarSymbol, n: int) -> list:
    """Image ``T_f(z^n)`` as ``[(degree, coefficient), ...]`` (nonzero only)."""
    out = []
    for k, f in sym._parts.items():
        w = weight(k, f, n)
        if not w.is_zero():
            out.append((n + k, w))
    return out


def act(sym: PolarSymbol, vec: Mapping[int, Scalar]) -> dict:
    """Apply ``T_f`` to a finite combination ``{degree: coefficient}``."""
    out: dict = {}
    for n, c in vec.items():
        if c.is_zero():
            continue
        for m, w in apply(sym, n):
            v = w * c
            out[m] = out[m] + v if m in out else v
    return {m: v for m, v in sorted(out.items()) if not v.is_zero()}


def commutator_image(f: PolarSymbol, g: PolarSymbol, n: int) -> dict:
    """``(T_f T_g - T_g T_f)(z^n)`` computed exactly, with no truncation."""
    e_n = {n: Scalar(1)}
    fg = act(f, act(g, e_n))
    gf = act(g, act(f, e_n))
    out = dict(fg)
    for m, v in gf.items():
        out[m] = out[m] - v if m in out else -v
    return {m: v for m, v in sorted(out.items()) if not v.is_zero()}


@dataclass(frozen=True)
class TruncatedMatrix:
    """Square block ``0..n_max`` of an operator matrix; all columns trusted."""

    n_max: int
    rows: tuple

    @property
    def trusted_cols(self) -> range:
        return range(self.n_max + 1)

    @property
    def dimension(self) -> int:
        return self.n_max + 1

    def __getitem__(self, idx) -> Scalar:
        m, n = idx
        return self.rows[m][n]

    def column(self, n: int) -> list:
        return [row[n] for row in self.rows]

    @property
    def exact(self) -> bool:
        return all(x.exact_path for row in self.rows for x in row)

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self.rows for x in row)

    def max_abs(self) -> float:
        return max((abs(x) for row in self.rows for x in row), default=0.0)

    def to_csv(self) -> str:
        return "".join(",".join(x.to_text() for x in row) + "\n" for row in self.rows)

    @classmethod
    def from_columns(cls, n_max: int, columns: Iterable[Mapping[int, Scalar]]) -> "TruncatedMatrix":
        grid = [[Scalar(0)] * (n_max + 1) for _ in range(n_max + 1)]
        for n, col in enumerate(columns):
            for m, v in col.items():
                if 0 <= m <= n_max:
                    grid[m][n] = v
        return cls(n_max, tuple(tuple(r) for r in grid))


def assemble_matrix(sym: PolarSymbol, n_max: int) -> TruncatedMatrix:
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    return TruncatedMatrix.from_columns(n_max, (dict(apply(sym, n)) for n in range(n_max + 1)))


def commutator(f: PolarSymbol, g: PolarSymbol, n_max: int) -> TruncatedMatrix:
    """Matrix of ``T_f T_g - T_g T_f``.

    Each column is the exact image of ``z^n`` (intermediate degrees are never
    cut off), which is what padding the factors by their combined reach
    would give; every reported entry is therefore trusted.
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    return TruncatedMatrix.from_columns(
        n_max, (commutator_image(f, g, n) for n in range(n_max + 1)))


def band(M: TruncatedMatrix, f_support: Iterable[int], g_support: Iterable[int],
         d: int) -> list:
    """Coefficients of ``z^(n+d)`` in column ``n``: ``[(n, value), ...]``.

    Empty when no pair of degrees from the two supports sums to ``d``.
    """
    reachable = {a + b for a in f_support for b in g_support}
    if d not in reachable:
        return []
    return [(n, M[n + d, n]) for n in range(M.n_max + 1) if 0 <= n + d <= M.n_max]


def adjoint_matrix(sym: PolarSymbol, n_max: int) -> TruncatedMatrix:
    """Matrix of ``T_f^* = T_{conj f}``."""
    return assemble_matrix(sym.conjugate(), n_max)


def adjoint_defect(sym: PolarSymbol, n_max: int) -> float:
    """Largest violation of the normalized-basis adjoint identity.

    With ``e_n = sqrt(n+1) z^n`` orthonormal, ``T_f^*`` has the conjugate
    transpose matrix, i.e. ``A*[m,n] (n+1) = conj(A[n,m]) (m+1)``.  Zero on
    the exact path means exactly zero.
    """
    A = assemble_matrix(sym, n_max)
    B = adjoint_matrix(sym, n_max)
    worst = 0.0
    for m in range(n_max + 1):
        for n in range(n_max + 1):
            diff = B[m, n] * (n + 1) - A[n, m].conjugate() * (m + 1)
            if not diff.is_zero():
                # An exact nonzero defect must never read as zero.
                worst = max(worst, abs(diff) / ((m + 1) * (n + 1)) ** 0.5,
                            0.0 if not diff.exact_path else 1e-300)
    return worst
