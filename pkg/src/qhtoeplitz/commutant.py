"""Commutants of ``T_g`` inside a finite ansatz, as an exact null space.

A candidate ``f = Σ_c x_c B_c`` (``B_c`` fixed basis symbols) commutes with
``T_g`` on ``z^0 .. z^n_max`` iff every coefficient of ``[T_f, T_g](z^n)``
vanishes.  The commutator is linear in ``f``, so each basis symbol
contributes one column and each pair ``(n, d)``, meaning the coefficient of
``z^(n+d)`` in the image of ``z^n``, contributes one row.

The result is a necessary condition within the ansatz.  A two-dimensional
kernel for ``g = z^2 + conj(z)^2`` is consistent with the classification of
its commutant, but it is evidence and not a proof: the ansatz is finite and
only finitely many basis vectors are tested.
"""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .mellin import Residual
from .operator import PolarSymbol, commutator, commutator_image
from .radial import DomainError, RadialFunction, l1_membership
from .scalar import Scalar

FLOAT_RANK_THRESHOLD = 1e-9
GAP_WARNING_RATIO = 10.0


def default_g() -> PolarSymbol:
    return harmonic_g(1, 1)


def harmonic_g(alpha, beta) -> PolarSymbol:
    """``α z^2 + β conj(z)^2``."""
    return PolarSymbol.monomial(2, 0, alpha) + PolarSymbol.monomial(0, 2, beta)


@dataclass(frozen=True)
class Ansatz:
    """Labelled basis symbols ``B_c``; coefficients are the unknowns.

    The default family places ``r^(|k|+2j)`` (``j = 0..J``) at every degree
    ``k`` in ``[kmin, kmax]``; ``log_augmented`` adds ``r^(|k|+2j) ln r``.
    """

    columns: tuple
    checked: bool = True

    @classmethod
    def monomial(cls, K: int | None = None, J: int = 3, log_augmented: bool = False,
                 kmin: int | None = None, kmax: int | None = None) -> "Ansatz":
        if K is not None:
            kmin = -K if kmin is None else kmin
            kmax = K if kmax is None else kmax
        if kmin is None or kmax is None or kmin > kmax:
            raise ValueError("ansatz needs a degree range")
        if J < 0:
            raise ValueError("J must be non-negative")
        cols = []
        for k in range(kmin, kmax + 1):
            for j in range(J + 1):
                e = abs(k) + 2 * j
                cols.append((f"k={k} r^{e}", PolarSymbol.quasi(k, RadialFunction.monomial(e))))
                if log_augmented:
                    cols.append((f"k={k} r^{e} ln r",
                                 PolarSymbol.quasi(k, RadialFunction.monomial(e, 1, 1))))
        return cls(tuple(cols))

    @classmethod
    def custom(cls, columns: Iterable, checked: bool = True) -> "Ansatz":
        """Arbitrary labelled columns; ``checked=False`` skips the L^1 test."""
        cols = tuple((str(label), sym) for label, sym in columns)
        labels = [c[0] for c in cols]
        if len(set(labels)) != len(labels):
            raise ValueError("ansatz labels must be distinct")
        return cls(cols, checked)

    def __post_init__(self):
        if not self.checked:
            return
        for label, sym in self.columns:
            for k, f in sym.parts.items():
                ok, _ = l1_membership(f)
                if not ok:
                    raise DomainError(f"ansatz column {label!r}, degree {k}: not in L^1(r dr)")

    @property
    def labels(self) -> tuple:
        return tuple(c[0] for c in self.columns)

    @property
    def symbols(self) -> tuple:
        return tuple(c[1] for c in self.columns)

    @property
    def reach(self) -> int:
        return max((s.reach for s in self.symbols), default=0)

    def combine(self, coeffs: Sequence[Scalar]) -> PolarSymbol:
        out = PolarSymbol.zero()
        for x, sym in zip(coeffs, self.symbols):
            if not x.is_zero():
                out = out + sym.scale(x)
        return out


@dataclass(frozen=True)
class CommutantProblem:
    g: PolarSymbol
    ansatz: Ansatz
    n_max: int = 60

    def __post_init__(self):
        need = 2 * self.ansatz.reach + 4
        if self.n_max < need:
            raise ValueError(f"n_max={self.n_max} is below 2K+4={need}")


@dataclass(frozen=True)
class LinearSystem:
    """Sparse rows keyed by ``(n, d)`` in ascending order; columns follow the ansatz."""

    row_keys: tuple
    rows: tuple
    labels: tuple

    @property
    def shape(self) -> tuple:
        return (len(self.rows), len(self.labels))

    @property
    def exact(self) -> bool:
        return all(v.exact_path for row in self.rows for v in row.values())

    def dense(self) -> np.ndarray:
        A = np.zeros(self.shape, dtype=complex)
        for i, row in enumerate(self.rows):
            for j, v in row.items():
                A[i, j] = complex(v)
        return A

    def apply(self, x: Sequence[Scalar]) -> list:
        out = []
        for row in self.rows:
            acc = Scalar(0)
            for j, v in row.items():
                acc = acc + v * x[j]
            out.append(acc)
        return out

    def metadata(self) -> str:
        cols = "; ".join(f"{j}:{lab}" for j, lab in enumerate(self.labels))
        return f"rows=(n,d) ascending count={len(self.rows)} columns=[{cols}]"


def _column_images(sym: PolarSymbol, g: PolarSymbol, n_max: int) -> list:
    return [commutator_image(sym, g, n) for n in range(n_max + 1)]


def assemble_system(p: CommutantProblem, threads: int = 1) -> LinearSystem:
    """Rows for every ``(n, d)`` where some ansatz column is nonzero."""
    syms = p.ansatz.symbols
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            images = list(pool.map(lambda s: _column_images(s, p.g, p.n_max), syms))
    else:
        images = [_column_images(s, p.g, p.n_max) for s in syms]
    table: dict = {}
    for j, per_n in enumerate(images):
        for n, col in enumerate(per_n):
            for m, v in col.items():
                table.setdefault((n, m - n), {})[j] = v
    keys = tuple(sorted(table))
    rows = tuple({j: table[key][j] for j in sorted(table[key])} for key in keys)
    return LinearSystem(keys, rows, p.ansatz.labels)


# -- elimination -------------------------------------------------------------------

def _row_combine(a: Scalar, r1: dict, b: Scalar, r2: dict) -> dict:
    """``a*r1 - b*r2`` with exact zeros dropped."""
    out = {}
    for j in r1.keys() | r2.keys():
        v = (a * r1[j] if j in r1 else Scalar(0)) - (b * r2[j] if j in r2 else Scalar(0))
        if not v.is_zero():
            out[j] = v
    return out


def exact_rref(rows: Iterable[dict], ncols: int) -> tuple:
    """Reduced echelon form over Q(i)[ln 2].

    Pivots are the first nonzero entry in column order.  Unit pivots are
    normalized to 1; other pivots are cleared fraction-free, so no division
    ever leaves the exact ring.  Returns ``(pivot_rows, pivot_cols)``.
    """
    pending = [dict(r) for r in rows if r]
    pivots: list = []
    cols: list = []
    for c in range(ncols):
        idx = next((i for i, r in enumerate(pending) if c in r), None)
        if idx is None:
            continue
        p = pending.pop(idx)
        pv = p[c]
        if pv.is_unit():
            p = {j: v / pv for j, v in p.items()}
            pv = Scalar(1)
        pending = [r if c not in r else _row_combine(pv, r, r[c], p) for r in pending]
        pending = [r for r in pending if r]
        pivots = [q if c not in q else _row_combine(pv, q, q[c], p) for q in pivots]
        pivots.append(p)
        cols.append(c)
    return pivots, cols


def exact_kernel(rows: Iterable[dict], ncols: int) -> list:
    pivots, pcols = exact_rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(pcols)]
    scale = Scalar(1)
    for p, c in zip(pivots, pcols):
        if not p[c].is_unit():
            scale = scale * p[c]
    basis = []
    for f in free:
        x = [Scalar(0)] * ncols
        x[f] = scale
        for p, c in zip(pivots, pcols):
            if f in p:
                pv = p[c]
                if pv.is_unit():
                    x[c] = -(p[f] / pv) * scale
                else:
                    other = Scalar(1)
                    for q, d in zip(pivots, pcols):
                        if d != c and not q[d].is_unit():
                            other = other * q[d]
                    x[c] = -p[f] * other
        basis.append(_normalize(x))
    return basis


def _normalize(x: list) -> list:
    lead = next((v for v in x if not v.is_zero()), None)
    if lead is not None and lead.is_unit():
        return [v / lead for v in x]
    return x


def exact_rank(rows: Iterable[dict], ncols: int) -> int:
    return len(exact_rref(rows, ncols)[1])


@dataclass(frozen=True)
class NullSpaceResult:
    dimension: int
    basis: tuple
    symbols: tuple
    exact: bool
    certified: bool = False
    warning: str | None = None
    candidate_dimensions: tuple = field(default=())

    def summary(self) -> str:
        return f"kernel_dim={self.dimension} exact={'true' if self.exact else 'false'}"


def _float_kernel(A: np.ndarray) -> tuple:
    m, n = A.shape
    if m == 0 or not np.any(A):
        return np.eye(n, dtype=complex), None, ()
    _, s, vh = np.linalg.svd(A)
    smax = s[0]
    full = np.zeros(n)
    full[:len(s)] = s
    null_mask = full < FLOAT_RANK_THRESHOLD * smax
    dim = int(null_mask.sum())
    warning = None
    cands: tuple = ()
    rank = n - dim
    # Compare the smallest kept and largest discarded singular values.
    if 0 < rank < n:
        kept, dropped = full[rank - 1], full[rank]
        if dropped > 0 and kept / dropped < GAP_WARNING_RATIO:
            cands = (dim, dim + 1) if kept < FLOAT_RANK_THRESHOLD * smax * GAP_WARNING_RATIO else (dim - 1, dim)
            warning = (f"singular-value gap {kept / dropped:.3g} < {GAP_WARNING_RATIO:g}; "
                       f"candidate kernel dimensions {cands[0]} and {cands[1]}")
    return vh[rank:].conj().T, warning, cands


def null_space(system: LinearSystem, ansatz: Ansatz | None = None) -> NullSpaceResult:
    ncols = len(system.labels)
    if system.exact:
        basis = exact_kernel(system.rows, ncols)
        certified = all(v.is_zero() for x in basis for v in system.apply(x))
        syms = tuple(ansatz.combine(x) for x in basis) if ansatz else ()
        return NullSpaceResult(len(basis), tuple(tuple(x) for x in basis), syms,
                               True, certified)
    K, warning, cands = _float_kernel(system.dense())
    basis = [[Scalar.float_(K[i, j]) for i in range(ncols)] for j in range(K.shape[1])]
    syms = tuple(ansatz.combine(x) for x in basis) if ansatz else ()
    return NullSpaceResult(len(basis), tuple(tuple(x) for x in basis), syms, False,
                           False, warning, cands)


def solve(p: CommutantProblem, threads: int = 1) -> NullSpaceResult:
    return null_space(assemble_system(p, threads), p.ansatz)


def residual(f: PolarSymbol, g: PolarSymbol, n_max: int) -> Residual:
    """Largest commutator entry on the trusted block; exact zero flagged."""
    M = commutator(f, g, n_max)
    if M.is_zero():
        return Residual(0.0, M.exact)
    return Residual(M.max_abs(), False)


# -- span comparison -----------------------------------------------------------------

def _coordinates(sym: PolarSymbol) -> dict:
    out = {}
    for k, f in sym.parts.items():
        for t in f:
            out[(k, t.key)] = t.coeff
    return out


def same_span(a: Sequence[PolarSymbol], b: Sequence[PolarSymbol]) -> bool:
    """Exact test that two finite families span the same space."""
    ca = [_coordinates(s) for s in a]
    cb = [_coordinates(s) for s in b]
    keys = sorted({k for c in ca + cb for k in c}, key=repr)
    index = {k: i for i, k in enumerate(keys)}

    def rows(cs):
        return [{index[k]: v for k, v in c.items()} for c in cs]

    ra, rb = exact_rank(rows(ca), len(keys)), exact_rank(rows(cb), len(keys))
    return ra == rb == exact_rank(rows(ca) + rows(cb), len(keys))


# -- problem files -----------------------------------------------------------------------

_SECTION = re.compile(r"^\[(\w+)\]$")


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def parse_problem(text: str, n_max: int | None = None) -> CommutantProblem:
    """Read ``[g]``, ``[ansatz]`` and ``[range]`` sections.

    ``[g]`` holds a symbol in ``degree k:`` format (default ``z^2 + conj(z)^2``).
    ``[ansatz]`` takes ``K``, ``J``, ``log``, ``kmin``, ``kmax``; ``[range]``
    takes ``n_max``.  An explicit ``n_max`` argument wins over the file.
    """
    sections: dict = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            current = m.group(1).lower()
            if current not in ("g", "ansatz", "range"):
                raise ValueError(f"line {lineno}: unknown section [{current}]")
            sections.setdefault(current, [])
            continue
        if current is None:
            raise ValueError(f"line {lineno}: content before any section header")
        sections[current].append((lineno, line))

    g = default_g()
    if sections.get("g"):
        g = PolarSymbol.from_text("\n".join(l for _, l in sections["g"]))

    def keyvals(name):
        out = {}
        for lineno, line in sections.get(name, []):
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected key = value")
            k, v = (s.strip() for s in line.split("=", 1))
            out[k.lower()] = v
        return out

    an = keyvals("ansatz")
    known = {"k", "j", "log", "kmin", "kmax"}
    if set(an) - known:
        raise ValueError(f"unknown ansatz keys: {sorted(set(an) - known)}")
    K = int(an["k"]) if "k" in an else (None if "kmin" in an or "kmax" in an else 4)
    ansatz = Ansatz.monomial(
        K=K, J=int(an.get("j", 3)), log_augmented=_parse_bool(an.get("log", "false")),
        kmin=int(an["kmin"]) if "kmin" in an else None,
        kmax=int(an["kmax"]) if "kmax" in an else None)
    rg = keyvals("range")
    if set(rg) - {"n_max"}:
        raise ValueError(f"unknown range keys: {sorted(set(rg) - {'n_max'})}")
    nm = n_max if n_max is not None else int(rg.get("n_max", 60))
    return CommutantProblem(g, ansatz, nm)

