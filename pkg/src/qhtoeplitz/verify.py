"""Replays of the commutant classification for ``g = z^2 + conj(z)^2``.

Every elimination is re-derived here from the operator engine.  A step
fixes the top degree by the analytic-commutant argument, then solves the
next band for a one- or two-parameter *family* ``Σ x_i B_i``:

* band rows: coefficients of ``z^(n+d)`` in ``[T_f, T_g](z^n)`` as linear
  forms in the parameters (rows that vanish identically are the generic
  ladder the family was built to satisfy);
* integrability rows: coefficients of non-``L^1(r dr)`` terms near ``r = 0``;
* boundedness rows: coefficients of terms unbounded near ``r = 0``.

A parameter is *forced* to zero when it vanishes on every kernel vector.
Printed intermediate constants never enter a verdict; they are compared
against the quadrature oracle in :func:`cross_check_constants`.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate

from .commutant import (Ansatz, CommutantProblem, assemble_system, default_g,
                        exact_kernel, harmonic_g, same_span, solve)
from .mellin import (fit_constant_offset, mellin_eval,
                     mellin_quadrature, numeric_convolution)
from .operator import PolarSymbol, commutator_image
from .radial import (GeometricRatioSpec, RadialFunction, bounded_singular_part,
                     convolve, l1_membership, l1_singular_part, reduce_geometric)
from .scalar import LN2, Scalar, ScalarLike, as_scalar, format_float

FLAG_TOLERANCE = 1e-8
STEP_TOLERANCE = 1e-10
CASCADE_KMIN = -14
BAND_NMAX = 16


# -- families ------------------------------------------------------------------------

@dataclass(frozen=True)
class FStarSpec:
    """``f_*(r) = -4c r^p (1 - r^q)/(1 - r^4)``; by default ``p = 2``, ``q = 2N``."""

    N: int
    c: ScalarLike = 1
    p: int = 2
    q: int | None = None

    def radial(self) -> RadialFunction:
        c = as_scalar(self.c)
        if c.is_zero():
            return RadialFunction.zero()
        q = 2 * self.N if self.q is None else self.q
        return reduce_geometric(GeometricRatioSpec(c * -4, self.p, q))


@dataclass(frozen=True)
class Family:
    """``Σ_i x_i B_i`` with named parameters; ``band`` is the degree shift solved."""

    name: str
    band: int
    params: tuple
    columns: tuple

    def symbol(self, values: Sequence[ScalarLike]) -> PolarSymbol:
        out = PolarSymbol.zero()
        for v, col in zip(values, self.columns):
            v = as_scalar(v)
            if not v.is_zero():
                out = out + col.scale(v)
        return out

    def index(self, param: str) -> int:
        return self.params.index(param)


def lower_odd_part(N: int) -> RadialFunction:
    """``r^-(N-2) (r^(2N-6) *_M f_*)`` for ``c_N = 1``."""
    return convolve(RadialFunction.monomial(2 * N - 6), FStarSpec(N).radial()).mul_monomial(-(N - 2))


def odd_family(N: int) -> Family:
    """Top piece ``c_N z^N`` with the general ``f_(N-4)`` solving band ``N-2``."""
    if N < 1 or N % 2 == 0:
        raise ValueError("odd family needs a positive odd N")
    lo = N - 4
    low = PolarSymbol.quasi(lo, RadialFunction.monomial(lo))
    top = PolarSymbol.quasi(N, RadialFunction.monomial(N)) + PolarSymbol.quasi(lo, lower_odd_part(N))
    return Family(f"odd N={N}", N - 2, (f"c{lo}", f"c{N}"), (low, top))


def lower_even_part(N: int) -> RadialFunction:
    """Inverse transform of ``Σ_i [1/(s+A) - 4/((s+A)(s+B_i))]``.

    Here ``A = N-4`` and ``B_i = 4+4i-N`` for ``0 <= i < N/2``; a double pole
    ``-4/(s+A)^2`` comes from ``4 r^A ln r``.
    """
    A = N - 4
    out = RadialFunction.zero()
    for i in range(N // 2):
        B = 4 + 4 * i - N
        out = out + RadialFunction.monomial(A)
        if B == A:
            out = out + RadialFunction.monomial(A, 4, 1)
        else:
            k = Fraction(-4, B - A)
            out = out + RadialFunction.monomial(A, k) - RadialFunction.monomial(B, k)
    return out


def even_family(N: int) -> Family:
    if N < 0 or N % 2:
        raise ValueError("even family needs a non-negative even N")
    lo = N - 4
    low = PolarSymbol.quasi(lo, RadialFunction.monomial(lo))
    top = PolarSymbol.quasi(N, RadialFunction.monomial(N)) + PolarSymbol.quasi(lo, lower_even_part(N))
    return Family(f"even N={N}", N - 2, (f"c{lo}", f"c{N}"), (low, top))


# -- derivation ------------------------------------------------------------------------

def _row_text(params: Sequence[str], row: dict) -> str:
    if not row:
        return "0"
    return " ".join(f"{params[j]}:{row[j].to_text()}" for j in sorted(row))


def _singular_rows(family: Family, extract) -> list:
    rows: dict = {}
    for j, col in enumerate(family.columns):
        for k, f in col.parts.items():
            for key, v in extract(f).items():
                rows.setdefault((k,) + key, {})
                acc = rows[(k,) + key].get(j, Scalar(0)) + v
                rows[(k,) + key][j] = acc
    out = []
    for key in sorted(rows):
        row = {j: v for j, v in rows[key].items() if not v.is_zero()}
        if row:
            out.append((key, row))
    return out


@dataclass
class Derivation:
    family: Family
    band_rows: list
    identity_rows: list
    l1_rows: list
    bounded_rows: list
    kernel_l1: list
    kernel_bounded: list

    def forced(self, param: str, bounded: bool = True) -> bool:
        j = self.family.index(param)
        kernel = self.kernel_bounded if bounded else self.kernel_l1
        return all(x[j].is_zero() for x in kernel)

    def row(self, n: int) -> dict | None:
        for (m, _), r in self.band_rows:
            if m == n:
                return r
        return {} if n in self.identity_rows else None

    def surviving(self) -> list:
        return [self.family.symbol(x) for x in self.kernel_bounded]


def derive(family: Family, g: PolarSymbol | None = None, n_max: int = BAND_NMAX,
           threads: int = 1) -> Derivation:
    g = default_g() if g is None else g
    ansatz = Ansatz.custom(zip(family.params, family.columns), checked=False)
    problem = CommutantProblem(g, ansatz, max(n_max, 2 * ansatz.reach + 4))
    system = assemble_system(problem, threads)
    band, seen = [], set()
    for key, row in zip(system.row_keys, system.rows):
        n, d = key
        if d == family.band and n <= n_max:
            band.append((key, row))
            seen.add(n)
    identity = [n for n in range(n_max + 1)
                if n not in seen and n + family.band >= 0]
    l1 = _singular_rows(family, l1_singular_part)
    bnd = _singular_rows(family, bounded_singular_part)
    ncols = len(family.params)
    k_l1 = exact_kernel([r for _, r in band] + [r for _, r in l1], ncols)
    k_b = exact_kernel([r for _, r in band] + [r for _, r in l1] + [r for _, r in bnd], ncols)
    return Derivation(family, band, identity, l1, bnd, k_l1, k_b)


# -- reports -------------------------------------------------------------------------------

@dataclass
class CaseReport:
    case: str
    entries: list = field(default_factory=list)
    verdict: str = "inconclusive"
    table: list = field(default_factory=list)

    def add(self, key: str, value) -> None:
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, Scalar):
            value = value.to_text()
        elif isinstance(value, float):
            value = format_float(value)
        self.entries.append((key, str(value)))

    def get(self, key: str) -> str:
        for k, v in self.entries:
            if k == key:
                return v
        raise KeyError(key)

    @property
    def forced(self) -> bool:
        return self.verdict == "forced"

    def to_text(self) -> str:
        lines = [f"case={self.case}"]
        lines += [f"{k}={v}" for k, v in self.entries]
        lines += [f"table={row.to_csv_line()}" for row in self.table]
        lines.append(f"verdict={self.verdict}")
        return "\n".join(lines) + "\n"


def _describe(report: CaseReport, der: Derivation, prefix: str = "") -> None:
    p = der.family.params
    report.add(prefix + "family", der.family.name)
    report.add(prefix + "band", der.family.band)
    for (n, d), row in der.band_rows:
        report.add(f"{prefix}row[n={n},d={d}]", _row_text(p, row))
    report.add(prefix + "identity_rows", ",".join(map(str, der.identity_rows)) or "none")
    for key, row in der.l1_rows:
        report.add(f"{prefix}l1[k={key[0]},e={key[1]},log={key[2]}]", _row_text(p, row))
    for key, row in der.bounded_rows:
        report.add(f"{prefix}bounded[k={key[0]},e={key[1]},log={key[2]}]", _row_text(p, row))
    report.add(prefix + "kernel_l1_dim", len(der.kernel_l1))
    report.add(prefix + "kernel_bounded_dim", len(der.kernel_bounded))


def _solver_forced(degree: int, K: int, n_max: int = 60, threads: int = 1) -> bool:
    """Generic monomial solver: is every kernel symbol zero at ``degree``?"""
    ansatz = Ansatz.monomial(K=K, J=3)
    res = solve(CommutantProblem(default_g(), ansatz, max(n_max, 2 * K + 4)), threads)
    return all(s[degree].is_zero() for s in res.symbols)


def analytic_commutant(k: int, J: int = 3, threads: int = 1):
    """Kernel of ``[., T_{z^2}]`` on the single-degree ansatz ``r^(|k|+2j)``."""
    ansatz = Ansatz.monomial(kmin=k, kmax=k, J=J)
    return solve(CommutantProblem(PolarSymbol.monomial(2, 0), ansatz, 2 * abs(k) + 8), threads)


def _analytic_entry(report: CaseReport, k: int, threads: int) -> bool:
    res = analytic_commutant(k, threads=threads)
    expect = [PolarSymbol.monomial(k, 0)] if k >= 0 else []
    ok = res.exact and same_span(res.symbols, expect)
    report.add(f"analytic[k={k}]", "z^%d" % k if k >= 0 and ok else ("zero" if ok else "mismatch"))
    return ok


def verify_functional_step(N: int, samples: Iterable[int] | None = None,
                           c: ScalarLike = 1) -> CaseReport:
    """Check the ``f_*`` difference identity and the constructed ``f_(N-4)``."""
    c = as_scalar(c)
    if samples is None:
        samples = (6, 8, 10) if N == 1 else (4, 6, 8)
    samples = tuple(samples)
    report = CaseReport(f"functional/N={N}")
    fs = FStarSpec(N, c).radial()
    worst_exact, worst_quad, exact_all = 0.0, 0.0, True
    for z in samples:
        lhs = mellin_eval(fs, z + 4).value - mellin_eval(fs, z).value
        rhs = c * (Fraction(z + 2 * N - 2, z + 2 * N + 2) - Fraction(z - 2, z + 2))
        diff = lhs - rhs
        exact_all = exact_all and diff.exact_path and diff.is_zero()
        worst_exact = max(worst_exact, abs(diff))
        if not c.is_zero():
            q = (complex(mellin_quadrature(fs, z + 4).value)
                 - complex(mellin_quadrature(fs, z).value))
            worst_quad = max(worst_quad, abs(q - complex(rhs)))
    report.add("fstar", fs.to_text().strip().replace("\n", "; ") or "0")
    report.add("difference_exact_zero", exact_all)
    report.add("difference_residual", worst_exact)
    report.add("difference_quadrature_residual", worst_quad)

    lo = N - 4
    f_lo = (RadialFunction.monomial(lo) + lower_odd_part(N).scale(c)) if not c.is_zero() \
        else RadialFunction.monomial(lo)
    worst_eq = 0.0
    eq_exact = True
    for z in samples:
        lhs = (mellin_eval(f_lo, z + N + 2).value * (z + 2 * N - 2)
               - mellin_eval(f_lo, z + N - 2).value * (z + 2 * N - 6))
        rhs = c * (Fraction(z + 2 * N - 2, z + 2 * N + 2) - Fraction(z - 2, z + 2))
        diff = lhs - rhs
        eq_exact = eq_exact and diff.exact_path and diff.is_zero()
        worst_eq = max(worst_eq, abs(diff))
    report.add("lower_part", f_lo.to_text().strip().replace("\n", "; "))
    report.add("recurrence_exact_zero", eq_exact)
    report.add("recurrence_residual", worst_eq)

    ok = worst_exact <= STEP_TOLERANCE and worst_eq <= STEP_TOLERANCE and (
        c.is_zero() or worst_quad <= STEP_TOLERANCE)
    if N == 1 and not c.is_zero():
        dev = i1_printed_deviation(c)
        report.add("i1_printed_max_deviation", dev)
        ok = ok and dev <= STEP_TOLERANCE
    report.verdict = "verified" if ok else "flagged"
    return report


def i1_printed(r, c: ScalarLike = 1) -> float:
    """Printed closed form of ``(r^-4 *_M f_*)(r)`` for ``N = 1``."""
    cc = complex(as_scalar(c))
    bracket = (4 * LN2 - 2) / 8 - r ** 4 / 4 + r ** 2 / 2 - math.log1p(r * r) / 2
    return -4 * cc * bracket / r ** 4


def i1_printed_deviation(c: ScalarLike = 1, count: int = 20) -> float:
    """Max deviation of the printed form from the symbolic and numeric convolutions."""
    fs = FStarSpec(1, c).radial()
    sym = convolve(RadialFunction.monomial(-4), fs)
    num = numeric_convolution(RadialFunction.monomial(-4), fs)
    worst = 0.0
    for i in range(count):
        r = 0.05 + 0.9 * i / (count - 1)
        p = i1_printed(r, c)
        worst = max(worst, abs(_q(sym(r)) - p), abs(_q(num(r)) - p))
    return worst


def verify_odd_elimination(N: int, n_max: int = BAND_NMAX, threads: int = 1) -> CaseReport:
    report = CaseReport(f"odd/N={N}")
    fam = odd_family(N)
    der = derive(fam, n_max=n_max, threads=threads)
    _describe(report, der)
    top = f"c{N}"
    lo = f"c{N - 4}"
    f_lo_text = fam.columns[1][N - 4].to_text().strip().replace("\n", "; ")
    report.add("constructed_lower_part", f_lo_text)
    if N == 1:
        ok, _ = l1_membership(fam.columns[1][N - 4] + RadialFunction.monomial(-3))
        report.add("lower_part_l1_at_unit_coefficients", ok)
    if N == 3:
        r1 = der.row(1)
        report.add("n1_factor", "0 (row vanishes identically)" if not r1 else _row_text(fam.params, r1))
    if N == 5:
        r0 = der.row(0)
        report.add("n0_factor", _row_text(fam.params, r0) if r0 else "0")
    l1_forced = der.forced(top, bounded=False)
    b_forced = der.forced(top, bounded=True)
    report.add("forced_l1", l1_forced)
    report.add("forced_bounded", b_forced)
    report.add(f"forced_{lo}", der.forced(lo))
    solver = _solver_forced(N, max(N, 4), threads=threads)
    report.add("solver_forced", solver)
    report.add("agree", solver == b_forced)
    if N in (3, 5):
        for z in ((2, 6) if N == 3 else (0, 4)):
            report.table.append(_fstar_row(f"odd-N{N}/oracle fstar({z})", N, z))
    # N = 1 also pins the lower coefficient; otherwise c_(N-4) may survive this band.
    done = b_forced and (N != 1 or der.forced(lo))
    report.verdict = "forced" if done else "inconclusive"
    return report


def verify_even_bound(N: int, c_top: ScalarLike = 1, threads: int = 1) -> CaseReport:
    if N < 6 or N % 2:
        raise ValueError("even bound applies to even N >= 6")
    report = CaseReport(f"even/N={N}")
    fam = even_family(N)
    lower = fam.symbol([0, c_top])[N - 4]
    report.add("constructed_lower_part", lower.to_text().strip().replace("\n", "; "))
    ok, _ = l1_membership(lower)
    report.add("lower_part_l1", ok)
    obstruction = l1_singular_part(lower)
    report.add("l1_obstruction", ", ".join(
        f"r^{e}" + (f" ln^{b} r" if b else "") for (e, b) in obstruction) or "none")
    reduced = fam.symbol([1, 0])[N - 4]
    report.add("lower_part_without_top_l1", l1_membership(reduced)[0])
    der = derive(fam, threads=threads)
    _describe(report, der)
    forced = der.forced(f"c{N}", bounded=False)
    report.add("forced_l1", forced)
    solver = _solver_forced(N, N, threads=threads)
    report.add("solver_forced", solver)
    report.add("agree", solver == forced)
    report.verdict = "forced" if forced and not ok else "inconclusive"
    return report


# -- cascade ------------------------------------------------------------------------------

def _eq_f0_probe() -> bool:
    """Band ``d = 2`` at ``n = 0`` equals ``6 f0^(6) - (3/5) c4 - 2 f0^(2)``.

    Probed with generic radial parts so the relation is checked as a linear
    form, not only on the solved family.
    """
    probes = [RadialFunction.monomial(Fraction(1, 2)), RadialFunction.monomial(0, 1, 1),
              RadialFunction.monomial(3), RadialFunction.inv1p(0)]
    for f in probes:
        img = commutator_image(PolarSymbol.quasi(0, f), default_g(), 0).get(2, Scalar(0))
        expect = mellin_eval(f, 6).value * 6 - mellin_eval(f, 2).value * 2
        if abs(img - expect) > 1e-13:
            return False
    img = commutator_image(PolarSymbol.monomial(4, 0), default_g(), 0).get(2, Scalar(0))
    return img == Scalar(Fraction(-3, 5))


def _step1(threads: int) -> tuple:
    rep = CaseReport("cascade/1 f4,f0")
    ok = _analytic_entry(rep, 4, threads)
    der = derive(even_family(4), threads=threads)
    _describe(rep, der)
    rep.add("n0_linear_form_matches", _eq_f0_probe())
    forced_l1 = der.forced("c4", bounded=False)
    rep.add("forced_c4", forced_l1)
    # With the family at c0 = c4 = 1, the periodic-constant fit returns c0.
    f0 = even_family(4).symbol([1, 1])[0]
    fit = fit_constant_offset(
        lambda z: 2 * (z + 1) * complex(mellin_eval(f0, 2 * z + 2).value),
        lambda z: (z - 1) / (z + 1) + (z + 1) / (z + 3), 2, 2, 8)
    rep.add("offset_fit_c0", complex(fit.constant).real)
    rep.add("offset_fit_deviation", fit.deviation)
    rep.verdict = "forced" if ok and forced_l1 else "inconclusive"
    return rep, der


def _step2(threads: int) -> CaseReport:
    rep = CaseReport("cascade/2 f-4 and f-4+4k")
    der = derive(even_family(0), threads=threads)
    _describe(rep, der)
    forced = der.forced("c-4", bounded=False)
    rep.add("forced_c-4", forced)
    ok = all([_analytic_entry(rep, k, threads) for k in range(-8, CASCADE_KMIN - 1, -4)])
    rep.verdict = "forced" if forced and ok else "inconclusive"
    return rep


def _step3(threads: int) -> CaseReport:
    rep = CaseReport("cascade/3 f3,f-1")
    ok = _analytic_entry(rep, 3, threads)
    fam = odd_family(3)
    der = derive(fam, threads=threads)
    _describe(rep, der)
    r0 = der.row(0) or {}
    r1 = der.row(1)
    rep.add("n1_row_vanishes", not r1)
    bounded = [r for _, r in der.bounded_rows]
    det = None
    if r0 and bounded:
        rows = [[r.get(j, Scalar(0)) for j in range(2)] for r in (r0, bounded[0])]
        det = rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
        lead = rows[0][0] * rows[1][0]
        if lead.is_unit():
            det = det / lead
        rep.add("derived_system", f"[{_row_text(fam.params, r0)}] [{_row_text(fam.params, bounded[0])}]")
        rep.add("derived_determinant_normalized", det)
        rep.add("derived_determinant_nonzero", not det.is_zero() and abs(det) > 1e-6)
    pd = printed_system_determinant()
    rep.add("printed_system_determinant", pd)
    rep.add("printed_system_determinant_value", float(pd))
    rep.add("printed_system_determinant_oracle", printed_system_determinant_oracle())
    forced = der.forced("c3") and der.forced("c-1")
    rep.add("forced_l1", der.forced("c3", bounded=False))
    rep.add("forced_bounded", forced)
    tails = all([_analytic_entry(rep, k, threads) for k in range(-5, CASCADE_KMIN - 1, -4)])
    rep.verdict = "forced" if ok and forced and tails else "inconclusive"
    return rep


def printed_system_determinant() -> Scalar:
    """``det [[1, -2 ln2], [1, f_*^(2)]]`` with ``f_*^(2)`` from the closed form (N=3)."""
    fs2 = mellin_eval(FStarSpec(3).radial(), 2).value
    return fs2 + Scalar.ln2() * 2


def printed_system_determinant_oracle() -> float:
    fs2 = complex(mellin_quadrature(FStarSpec(3).radial(), 2).value).real
    return fs2 + 2 * LN2


def _step4(threads: int) -> CaseReport:
    rep = CaseReport("cascade/4 f1,f-3")
    ok = _analytic_entry(rep, 1, threads)
    der = derive(odd_family(1), threads=threads)
    _describe(rep, der)
    forced = der.forced("c1") and der.forced("c-3")
    rep.add("forced", forced)
    tails = all([_analytic_entry(rep, k, threads) for k in range(-7, CASCADE_KMIN - 1, -4)])
    rep.verdict = "forced" if ok and forced and tails else "inconclusive"
    return rep


def _step5(threads: int) -> tuple:
    rep = CaseReport("cascade/5 f2,f-2")
    ok = _analytic_entry(rep, 2, threads)
    der = derive(even_family(2), threads=threads)
    _describe(rep, der)
    forced = der.forced("c-2", bounded=False)
    rep.add("forced_c-2", forced)
    surv = der.surviving()
    rep.add("surviving", " | ".join(s.to_text().strip().replace("\n", "; ") for s in surv))
    expected = [harmonic_g(1, 1)]
    good = ok and forced and same_span(surv, expected)
    rep.verdict = "forced" if good else "inconclusive"
    return rep, der


def _step6(threads: int) -> CaseReport:
    rep = CaseReport("cascade/6 f-6 and f-2+4k")
    zb2 = PolarSymbol.monomial(0, 2)
    quiet = all(not commutator_image(zb2, zb2, n) for n in range(BAND_NMAX + 1))
    rep.add("conj_z2_self_band_zero", quiet)
    ok = all([_analytic_entry(rep, k, threads) for k in range(-6, CASCADE_KMIN - 1, -4)])
    rep.verdict = "forced" if quiet and ok else "inconclusive"
    return rep


def cascade_family(threads: int = 1) -> tuple:
    """Surviving symbols assembled from the cascade steps and the report list."""
    r1, d1 = _step1(threads)
    r2 = _step2(threads)
    r3 = _step3(threads)
    r4 = _step4(threads)
    r5, d5 = _step5(threads)
    r6 = _step6(threads)
    survivors = [s for s in d1.surviving() if not s.is_zero()]
    survivors += [s for s in d5.surviving() if not s.is_zero()]
    return [r1, r2, r3, r4, r5, r6], survivors


def verify_theorem_cascade(threads: int = 1) -> list:
    reports, survivors = cascade_family(threads)
    final = CaseReport("cascade/final")
    final.add("surviving", " | ".join(
        s.to_text().strip().replace("\n", "; ") for s in survivors))
    expected = [PolarSymbol.constant(1), harmonic_g(1, 1)]
    final.add("matches_affine_family", same_span(survivors, expected))
    kernel = solve(CommutantProblem(default_g(), Ansatz.monomial(K=4, J=3), 60), threads)
    final.add("solver", kernel.summary())
    agree = kernel.exact and same_span(survivors, kernel.symbols)
    final.add("agree", agree)
    final.add("coverage", f"pattern verified for k >= {CASCADE_KMIN}")
    all_steps = all(r.forced for r in reports)
    final.verdict = "forced" if all_steps and agree and same_span(survivors, expected) \
        else "inconclusive"
    return reports + [final]


# -- constants cross-check ---------------------------------------------------------------

@dataclass(frozen=True)
class CrossCheckRow:
    location: str
    group: str
    paper_expr: str
    paper_value: float
    oracle_value: float
    closed_value: float

    @property
    def delta(self) -> float:
        return abs(self.paper_value - self.oracle_value)

    @property
    def flag(self) -> bool:
        return self.delta > FLAG_TOLERANCE

    @property
    def closed_delta(self) -> float:
        return abs(self.closed_value - self.oracle_value)

    def fields(self) -> list:
        return [self.location, self.paper_expr, format_float(self.paper_value),
                format_float(self.oracle_value), format_float(self.delta),
                "1" if self.flag else "0"]

    def to_csv_line(self) -> str:
        return _csv_text([self.fields()]).rstrip("\n")


CSV_COLUMNS = ["location", "paper_expr", "paper_value", "oracle_value", "delta", "flag"]


def _csv_text(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _q(x) -> float:
    return complex(np.asarray(x).reshape(-1)[0]).real


def _fstar_row(location, N, z, expr="", printed=None, group=None, p=2, q=None) -> CrossCheckRow:
    fs = FStarSpec(N, 1, p, q).radial()
    oracle = _q(mellin_quadrature(fs, z).value)
    closed = _q(mellin_eval(fs, z).value)
    pv = closed if printed is None else float(printed)
    return CrossCheckRow(location, group or f"N{N}:fstar({z})", expr or "(oracle only)",
                         pv, oracle, closed)


def _S(re_part, ln2_part=0) -> Scalar:
    return Scalar(Fraction(re_part)) + Scalar.ln2() * Fraction(ln2_part)


def _conv_rows() -> list:
    rows = []
    half = 0.5
    # theorem-side f_-1 step: f_* with N = 3
    fs3 = FStarSpec(3).radial()
    const_oracle = _q(mellin_quadrature(fs3, 0).value)
    const_closed = _q(mellin_eval(fs3, 0).value)
    rows.append(CrossCheckRow(
        "cascade-f-1/conv constant", "f-1:conv constant", "-4*(1/2+ln2/2)",
        float(_S(-2, -2)), const_oracle, const_closed))
    shape_oracle = -integrate.quad(lambda t: complex(fs3(t)).real / t, 0, half,
                                   epsabs=1e-14, epsrel=1e-13)[0]
    shape_closed = _q(convolve(RadialFunction.constant(1), fs3)(half)) - const_closed
    printed = half ** 4 + 2 * math.log1p(half ** 2)
    rows.append(CrossCheckRow(
        "cascade-f-1/conv shape at r=1/2", "f-1:conv shape", "4*(r^4/4+ln(1+r^2)/2)",
        printed, shape_oracle, shape_closed))
    # theorem-side f_-3 step: f_* = -4 r^6 (1-r^2)/(1-r^4)
    fs1 = FStarSpec(1, 1, 6, 2).radial()
    const_oracle = _q(mellin_quadrature(fs1, 0).value)
    const_closed = _q(mellin_eval(fs1, 0).value)
    rows.append(CrossCheckRow(
        "cascade-f-3/conv constant", "f-3:conv constant", "-2*(ln2-1/2)",
        float(_S(1, -2)), const_oracle, const_closed))
    shape_oracle = -integrate.quad(lambda t: complex(fs1(t)).real / t, 0, half,
                                   epsabs=1e-14, epsrel=1e-13)[0]
    shape_closed = _q(convolve(RadialFunction.constant(1), fs1)(half)) - const_closed
    printed = -2 * (3 * half ** 2 - half ** 4 / 2 - math.log1p(half ** 2))
    rows.append(CrossCheckRow(
        "cascade-f-3/conv shape at r=1/2", "f-3:conv shape", "-2*(3r^2-r^4/2-ln(1+r^2))",
        printed, shape_oracle, shape_closed))
    return rows


def _i1_rows() -> list:
    kernel = RadialFunction.inv1p(0)
    oracle = _q(mellin_quadrature(kernel, 6).value)
    closed = _q(mellin_eval(kernel, 6).value)
    rows = [CrossCheckRow("odd-N1/I1 bracket constant", "N1:I1 constant", "(4*ln2-2)/8",
                          float(_S(Fraction(-1, 4), Fraction(1, 2))), oracle, closed)]
    r = 0.5
    fs = FStarSpec(1).radial()
    num = _q(numeric_convolution(RadialFunction.monomial(-4), fs)(r))
    sym = _q(convolve(RadialFunction.monomial(-4), fs)(r))
    rows.append(CrossCheckRow("odd-N1/I1 at r=1/2", "N1:I1 value",
                              "-4/r^4*((4ln2-2)/8-r^4/4+r^2/2-ln(1+r^2)/2)",
                              i1_printed(r), num, sym))
    return rows


def _f0_rows() -> list:
    # solved f0 at c0 = 0, c4 = 1: 1 + r^4 + 4 ln r
    f0 = even_family(4).symbol([0, 1])[0]
    rows = []
    for z, expr, printed in ((2, "(c0+c4)/2-5*c4/6 at c0=0,c4=1", Fraction(1, 2) - Fraction(5, 6)),
                             (6, "(c0+c4)/6-c4/10 at c0=0,c4=1", Fraction(1, 6) - Fraction(1, 10))):
        rows.append(CrossCheckRow(f"cascade-f0/f0hat({z})", f"f0hat({z})", expr, float(printed),
                                  _q(mellin_quadrature(f0, z).value), _q(mellin_eval(f0, z).value)))
    return rows


def cross_check_constants() -> list:
    """Printed constants (normalized to unit leading coefficients) against the oracle."""
    rows = [
        _fstar_row("odd-N3/fstar(2)", 3, 2, "-4*(2-3*ln2)/3", _S(Fraction(-8, 3), 4)),
        _fstar_row("cascade-f-1/fstar(2)", 3, 2, "2*ln2-8/3", _S(Fraction(-8, 3), 2)),
        _fstar_row("odd-N3/fstar(6)", 3, 6, "-(31-30*ln2)/15", _S(Fraction(-31, 15), 2)),
        _fstar_row("cascade-f-1/fstar(6)", 3, 6, "-4*(31/60-ln2/2)", _S(Fraction(-31, 15), 2)),
        _fstar_row("cascade-f-1/fstar(4)", 3, 4, "1/2-2*ln2", _S(Fraction(1, 2), -2)),
        _fstar_row("odd-N5/fstar(0)", 5, 0, "-(3+4*ln2)/2", _S(Fraction(-3, 2), -2)),
        _fstar_row("odd-N5/fstar(4)", 5, 4, "-(-1+12*ln2)/6", _S(Fraction(1, 6), -2)),
        _fstar_row("odd-N5/fstar(4) restated", 5, 4, "(1-12*ln2)/6", _S(Fraction(1, 6), -2)),
    ]
    rows += _i1_rows()
    rows += _conv_rows()
    rows += _f0_rows()
    det = printed_system_determinant_oracle()
    rows.append(CrossCheckRow("cascade-f-1/determinant", "f-1:determinant", "4*ln2-8/3",
                              4 * LN2 - 8 / 3, det, float(printed_system_determinant())))
    return rows


def table_csv(rows: Sequence[CrossCheckRow] | None = None) -> str:
    rows = cross_check_constants() if rows is None else rows
    return _csv_text([CSV_COLUMNS] + [r.fields() for r in rows])


def flagged_groups(rows: Sequence[CrossCheckRow]) -> dict:
    """``{group: [rows]}`` for every group containing a flagged row."""
    out: dict = {}
    for r in rows:
        out.setdefault(r.group, []).append(r)
    return {g: rs for g, rs in out.items() if any(r.flag for r in rs)}


def all_reports(threads: int = 1) -> list:
    reps = [verify_functional_step(N) for N in (1, 3, 5)]
    reps += [verify_odd_elimination(N, threads=threads) for N in (1, 3, 5)]
    reps += [verify_even_bound(N, threads=threads) for N in (6, 8)]
    reps += verify_theorem_cascade(threads)
    return reps

