from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from qhtoeplitz import verify
from qhtoeplitz.commutant import same_span
from qhtoeplitz.mellin import mellin_eval
from qhtoeplitz.operator import PolarSymbol
from qhtoeplitz.radial import RadialFunction, l1_membership
from qhtoeplitz.scalar import LN2, Scalar

FLAGGED = {"odd-N3/fstar(2)", "cascade-f-1/conv constant",
           "cascade-f-3/conv shape at r=1/2", "cascade-f0/f0hat(6)"}


@pytest.fixture(scope="module")
def cascade():
    return verify.verify_theorem_cascade()


@pytest.fixture(scope="module")
def table():
    return verify.cross_check_constants()


def scipy_fstar_mellin(N, z):
    f = lambda r: -4 * r ** 2 * (1 - r ** (2 * N)) / (1 - r ** 4)
    return integrate.quad(lambda r: f(r) * r ** (z - 1), 0, 1, epsabs=1e-14, epsrel=1e-13)[0]


# -- families ---------------------------------------------------------------------------------

def test_fstar_spec():
    r = np.linspace(0.05, 0.95, 19)
    for N in (1, 3, 5, 7):
        f = verify.FStarSpec(N, 2).radial()
        assert np.max(np.abs(f(r) + 8 * r ** 2 * (1 - r ** (2 * N)) / (1 - r ** 4))) < 1e-12
    assert verify.FStarSpec(3, 0).radial().is_zero()


def test_odd_family_shape():
    fam = verify.odd_family(3)
    assert fam.params == ("c-1", "c3") and fam.band == 1
    with pytest.raises(ValueError):
        verify.odd_family(4)


@pytest.mark.parametrize("N", [2, 4, 6, 8])
def test_even_part_inverts_partial_fractions(N):
    f = verify.lower_even_part(N)
    A = N - 4
    for s in (11, 13, Fraction(29, 2)):
        expect = sum(Fraction(1, s + A) - Fraction(4, (s + A) * (s + 4 + 4 * i - N))
                     for i in range(N // 2))
        assert mellin_eval(f, s).value == Scalar(expect)


# -- functional step ----------------------------------------------------------------------

@pytest.mark.parametrize("N", [1, 3, 5])
def test_functional_step(N):
    rep = verify.verify_functional_step(N)
    assert rep.verdict == "verified"
    assert rep.get("difference_exact_zero") == "true"
    assert rep.get("recurrence_exact_zero") == "true"
    assert float(rep.get("difference_quadrature_residual")) <= 1e-10


def test_functional_step_zero_coefficient():
    rep = verify.verify_functional_step(3, c=0)
    assert rep.get("fstar") == "0"
    assert rep.get("difference_exact_zero") == "true"
    assert rep.verdict == "verified"


def test_i1_printed_form():
    assert verify.i1_printed_deviation() <= 1e-10


# -- odd cases ----------------------------------------------------------------------------

def test_odd_n1():
    rep = verify.verify_odd_elimination(1)
    assert rep.verdict == "forced"
    assert rep.get("row[n=1,d=-1]") == "c-3:1/1 c1:-2/1+2/1*ln2"
    assert rep.get("row[n=2,d=-1]") == "c-3:1/1 c1:1/1-2/1*ln2"
    assert rep.get("kernel_l1_dim") == "0"
    assert rep.get("lower_part_l1_at_unit_coefficients") == "false"
    assert rep.get("agree") == "true"


def test_odd_n3():
    rep = verify.verify_odd_elimination(3)
    assert rep.verdict == "forced"
    assert rep.get("row[n=0,d=1]") == "c-1:1/1 c3:-2/1*ln2"
    assert rep.get("n1_factor") == "0 (row vanishes identically)"
    # L^1 alone leaves a line; boundedness at the origin forces c3
    assert rep.get("kernel_l1_dim") == "1"
    assert rep.get("forced_l1") == "false"
    assert rep.get("bounded[k=-1,e=-1,log=0]") == "c-1:1/1 c3:-1/1-2/1*ln2"
    assert rep.get("forced_bounded") == "true"
    assert rep.get("agree") == "true"


def test_odd_n5():
    rep = verify.verify_odd_elimination(5)
    assert rep.verdict == "forced"
    assert rep.get("n0_factor") == "c5:1/1"
    # c1 belongs to the next band down and is not decided here
    assert rep.get("forced_c1") == "false"
    locs = [r.location for r in rep.table]
    assert locs == ["odd-N5/oracle fstar(0)", "odd-N5/oracle fstar(4)"]


# -- even cases -----------------------------------------------------------------------------

@pytest.mark.parametrize("N,obstruction", [(6, "r^-2"), (8, "r^-4")])
def test_even_bound(N, obstruction):
    rep = verify.verify_even_bound(N)
    assert rep.verdict == "forced"
    assert rep.get("l1_obstruction") == obstruction
    assert rep.get("lower_part_l1") == "false"
    assert rep.get("lower_part_without_top_l1") == "true"
    assert rep.get("agree") == "true"


def test_even_bound_zero_top():
    fam = verify.even_family(6)
    lower = fam.symbol([1, 0])[2]
    assert lower == RadialFunction.monomial(2)
    assert l1_membership(lower)[0]


def test_even_bound_rejects_small_n():
    with pytest.raises(ValueError):
        verify.verify_even_bound(4)


# -- cascade -----------------------------------------------------------------------------------

def test_cascade_verdicts(cascade):
    assert [r.case for r in cascade] == [
        "cascade/1 f4,f0", "cascade/2 f-4 and f-4+4k", "cascade/3 f3,f-1",
        "cascade/4 f1,f-3", "cascade/5 f2,f-2", "cascade/6 f-6 and f-2+4k", "cascade/final"]
    assert all(r.verdict == "forced" for r in cascade)


def test_cascade_step1(cascade):
    rep = cascade[0]
    assert rep.get("n0_linear_form_matches") == "true"
    assert rep.get("row[n=0,d=2]") == "c4:1/1"
    assert float(rep.get("offset_fit_c0")) == pytest.approx(1.0, abs=1e-12)


def test_cascade_step3_determinants(cascade):
    rep = cascade[2]
    assert rep.get("n1_row_vanishes") == "true"
    assert rep.get("derived_determinant_normalized") == "-1/1"
    assert rep.get("printed_system_determinant") == "-8/3+4/1*ln2"


def test_printed_determinant():
    det = verify.printed_system_determinant()
    assert det == Scalar(Fraction(-8, 3)) + Scalar.ln2() * 4
    assert not det.is_zero()
    assert abs(float(det)) > 1e-6
    assert float(det) == pytest.approx(4 * LN2 - 8 / 3, abs=1e-15)
    assert abs(verify.printed_system_determinant_oracle() - float(det)) <= 1e-10
    assert abs(float(det) - 0.10592205557311) < 1e-13


def test_cascade_final(cascade):
    final = cascade[-1]
    assert final.get("matches_affine_family") == "true"
    assert final.get("solver") == "kernel_dim=2 exact=true"
    assert final.get("coverage") == "pattern verified for k >= -14"


def test_cascade_family_survivors():
    _, survivors = verify.cascade_family()
    assert same_span(survivors, [PolarSymbol.constant(1), PolarSymbol.monomial(2, 0) + PolarSymbol.monomial(0, 2)])


def test_analytic_commutant_pattern():
    assert same_span(verify.analytic_commutant(3).symbols, [PolarSymbol.monomial(3, 0)])
    assert verify.analytic_commutant(-6).dimension == 0


# -- constants table -----------------------------------------------------------------------------

def test_table_flags(table):
    assert {r.location for r in table if r.flag} == FLAGGED


def test_table_closed_form_agrees_with_oracle(table):
    assert all(r.closed_delta <= 1e-10 for r in table)


def test_table_has_catalogue(table):
    locs = {r.location for r in table}
    for loc in ("odd-N3/fstar(2)", "cascade-f-1/fstar(2)", "odd-N3/fstar(6)",
                "cascade-f-1/fstar(6)", "cascade-f-1/fstar(4)", "odd-N5/fstar(0)",
                "odd-N5/fstar(4)", "odd-N1/I1 bracket constant", "cascade-f-1/conv constant",
                "cascade-f-3/conv constant", "cascade-f-1/determinant"):
        assert loc in locs


def test_fstar2_pair_resolved_by_oracle(table):
    groups = verify.flagged_groups(table)
    pair = groups["N3:fstar(2)"]
    assert len(pair) == 2
    assert sum(not r.flag for r in pair) == 1
    oracle = pair[0].oracle_value
    assert oracle == pytest.approx(2 * LN2 - 8 / 3, abs=1e-10)
    assert oracle == pytest.approx(scipy_fstar_mellin(3, 2), abs=1e-10)


def test_n5_fstar4_matches_oracle(table):
    rows = [r for r in table if r.group == "N5:fstar(4)"]
    assert len(rows) == 2 and not any(r.flag for r in rows)
    assert rows[0].oracle_value == pytest.approx(scipy_fstar_mellin(5, 4), abs=1e-10)


def test_paper_constants_reproduced(table):
    by_loc = {r.location: r for r in table}
    assert by_loc["odd-N3/fstar(6)"].oracle_value == pytest.approx(-(31 - 30 * LN2) / 15, abs=1e-10)
    assert by_loc["odd-N5/fstar(0)"].oracle_value == pytest.approx(-(3 + 4 * LN2) / 2, abs=1e-10)


def test_table_csv(table):
    text = verify.table_csv(table)
    lines = text.splitlines()
    assert lines[0] == "location,paper_expr,paper_value,oracle_value,delta,flag"
    assert len(lines) == len(table) + 1
    assert verify.table_csv() == text


def test_reports_deterministic():
    a = "".join(r.to_text() for r in verify.all_reports(1))
    b = "".join(r.to_text() for r in verify.all_reports(3))
    assert a == b
