from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qhtoeplitz.mellin import mellin_quadrature
from qhtoeplitz.operator import (
    PolarSymbol, QuasiSymbol, TruncatedMatrix, WeightedShift, adjoint_defect,
    adjoint_matrix, apply, assemble_matrix, band, commutator, commutator_image,
    shift_of, weight,
)
from qhtoeplitz.radial import DomainError, RadialFunction
from qhtoeplitz.scalar import Scalar

Z2 = PolarSymbol.monomial(2, 0)
ZB2 = PolarSymbol.monomial(0, 2)
G = Z2 + ZB2
R2 = RadialFunction.monomial(2)


def quad_weight(k, phi, n):
    return 2 * (n + k + 1) * complex(mellin_quadrature(phi, 2 * n + k + 2).value)


# -- weights ----------------------------------------------------------------------------

def test_analytic_weight_is_one():
    w = shift_of(QuasiSymbol(2, R2))
    assert all(w(n) == Scalar(1) for n in range(30))


def test_conj_z2_weights():
    w = shift_of(QuasiSymbol(-2, R2))
    assert w(3) == Scalar(Fraction(1, 2))
    for n in range(2, 30):
        assert w(n) == Scalar(Fraction(n - 1, n + 1))
    assert w(1).is_zero() and w(0).is_zero()


def test_weight_rejects_negative_index():
    with pytest.raises(ValueError):
        weight(0, R2, -1)


def test_quasi_symbol_checks_l1():
    with pytest.raises(DomainError):
        QuasiSymbol(0, RadialFunction.monomial(-3))
    sym = QuasiSymbol.unchecked(0, RadialFunction.monomial(-3))
    assert sym.k == 0


def test_unchecked_symbol_domain_error():
    w = WeightedShift(0, RadialFunction.monomial(-3))
    with pytest.raises(DomainError):
        w(0)


@pytest.mark.parametrize("k,phi", [
    (1, RadialFunction.monomial(3, 1, 1)),
    (-3, RadialFunction.monomial(5) + RadialFunction.monomial(3, 2, 2)),
    (0, RadialFunction.inv1p(0)),
    (-1, RadialFunction.log1p(1)),
])
def test_exact_weights_match_quadrature(k, phi):
    for n in range(max(0, -k), 12):
        w = weight(k, phi, n)
        assert w.exact_path
        assert abs(complex(w) - quad_weight(k, phi, n)) <= 1e-12 * max(1, abs(complex(w)))


@given(st.integers(0, 6), st.integers(0, 40))
def test_multiplication_identity(k, n):
    assert apply(PolarSymbol.monomial(k, 0), n) == [(n + k, Scalar(1))]


# -- apply -----------------------------------------------------------------------------

def test_apply_examples():
    assert apply(G, 0) == [(2, Scalar(1))]
    assert sorted(apply(G, 2)) == [(0, Scalar(Fraction(1, 3))), (4, Scalar(1))]
    assert apply(PolarSymbol.constant(1), 7) == [(7, Scalar(1))]


# -- matrices ----------------------------------------------------------------------------

def test_matrix_z2():
    M = assemble_matrix(Z2, 3)
    for m in range(4):
        for n in range(4):
            assert M[m, n] == (Scalar(1) if m == n + 2 else Scalar(0))


def test_matrix_conj_z2():
    M = assemble_matrix(ZB2, 3)
    nonzero = {(m, n): M[m, n] for m in range(4) for n in range(4) if not M[m, n].is_zero()}
    assert nonzero == {(0, 2): Scalar(Fraction(1, 3)), (1, 3): Scalar(Fraction(1, 2))}


def test_matrix_zero():
    assert assemble_matrix(PolarSymbol.zero(), 5).is_zero()


def test_matrix_csv():
    text = assemble_matrix(ZB2, 2).to_csv()
    assert text == "0/1,0/1,1/3\n0/1,0/1,0/1\n0/1,0/1,0/1\n"


def test_matrix_negative_size():
    with pytest.raises(ValueError):
        assemble_matrix(Z2, -1)


# -- commutators ---------------------------------------------------------------------------

def test_self_commutator_zero():
    M = commutator(G, G, 20)
    assert M.is_zero() and M.exact


def test_zbar_z2_commutator():
    zb = PolarSymbol.monomial(0, 1)
    M = commutator(zb, Z2, 20)
    for n in range(20):
        assert M[n + 1, n] == Scalar(Fraction(2, (n + 1) * (n + 3)))
    assert M[2, 1] == Scalar(Fraction(1, 4))
    # the same entry from quadrature weights (independent path)
    r1 = RadialFunction.monomial(1)
    for n in range(6):
        q = quad_weight(-1, r1, n + 2) - quad_weight(-1, r1, n)
        assert abs(q - 2 / ((n + 1) * (n + 3))) <= 1e-12


@pytest.mark.parametrize("alpha,beta", [(2, 5), (1, 0), (Scalar.i(), 5)])
def test_affine_commutes(alpha, beta):
    f = G.scale(alpha) + PolarSymbol.constant(beta)
    M = commutator(f, G, 32)
    assert M.is_zero() and M.exact


def test_band_conj_z2_z2():
    M = commutator(ZB2, Z2, 10)
    d0 = dict(band(M, [-2], [2], 0))
    # [T_zb2, T_z2](z^n) at degree n: (n+1)/(n+3) - (n-1)/(n+1); n=2 gives 4/15
    assert d0[2] == Scalar(Fraction(4, 15))
    for n in range(2, 10):
        assert d0[n] == Scalar(Fraction(n + 1, n + 3) - Fraction(n - 1, n + 1))
    # reversed order flips the sign
    d0r = dict(band(commutator(Z2, ZB2, 10), [2], [-2], 0))
    assert d0r[2] == Scalar(Fraction(-4, 15))


def test_band_unreachable():
    M = commutator(ZB2, Z2, 10)
    assert band(M, [-2], [2], 3) == []


def test_bands_zero_for_self():
    M = commutator(G, G, 12)
    for d in (-4, 0, 4):
        assert all(v.is_zero() for _, v in band(M, G.support, G.support, d))


def quasi_symbols():
    return st.builds(
        lambda k, a, c: PolarSymbol.quasi(k, RadialFunction.monomial(abs(k) + 2 * a, c)),
        st.integers(-3, 3), st.integers(0, 2), st.integers(-3, 3))


@settings(max_examples=30, deadline=None)
@given(quasi_symbols(), quasi_symbols())
def test_degree_bookkeeping(f, g):
    if f.is_zero() or g.is_zero():
        return
    (j,), (l,) = f.support, g.support
    for n in range(12):
        img = commutator_image(f, g, n)
        assert set(img) <= {n + j + l}


@settings(max_examples=15, deadline=None)
@given(quasi_symbols(), quasi_symbols())
def test_truncation_stability(f, g):
    small = commutator(f, g, 10)
    big = commutator(f, g, 20)
    for m in range(11):
        for n in range(11):
            assert small[m, n] == big[m, n]


# -- adjoints --------------------------------------------------------------------------------

def test_adjoint_of_z2():
    A = adjoint_matrix(Z2, 8)
    B = assemble_matrix(ZB2, 8)
    assert A == B
    assert adjoint_defect(Z2, 8) == 0.0


def test_real_radial_symmetric():
    f0 = PolarSymbol.quasi(0, RadialFunction.monomial(2) + RadialFunction.inv1p(0, 3))
    assert adjoint_defect(f0, 10) == 0.0
    assert hermitian_defect(f0, 10) == 0.0


def hermitian_defect(sym, n_max):
    A = assemble_matrix(sym, n_max)
    return max(abs(A[m, n] * (n + 1) - A[n, m].conjugate() * (m + 1))
               for m in range(n_max + 1) for n in range(n_max + 1))


def test_hermitian_real_symbol():
    assert adjoint_defect(G, 12) == 0.0
    assert hermitian_defect(G, 12) == 0.0


def test_adjoint_identity_complex_symbol():
    # T_f^* = T_conj(f) holds for every symbol; Hermitian symmetry only for real ones
    sym = G.scale(Scalar.i())
    assert adjoint_defect(sym, 6) == 0.0
    assert hermitian_defect(sym, 6) > 0.1


def test_adjoint_float_path():
    sym = PolarSymbol.quasi(1, RadialFunction.monomial(Fraction(3, 2), 0.7))
    real = sym + sym.conjugate()
    assert adjoint_defect(real, 10) <= 1e-12
    assert hermitian_defect(real, 10) <= 1e-12


# -- symbol text -------------------------------------------------------------------------------

def test_symbol_text_round_trip():
    sym = G.scale(2) + PolarSymbol.constant(5) + PolarSymbol.quasi(-1, RadialFunction.inv1p(1))
    text = sym.to_text()
    assert text.startswith("degree -2:\n")
    assert PolarSymbol.from_text(text) == sym


def test_symbol_parse_errors():
    with pytest.raises(ValueError):
        PolarSymbol.from_text("MONLOG 1 2/1 0\n")
    with pytest.raises(ValueError):
        PolarSymbol.from_text("degree x:\nMONLOG 1 2/1 0\n")


def test_truncated_matrix_columns():
    M = TruncatedMatrix.from_columns(2, [{0: Scalar(1)}, {5: Scalar(2)}, {}])
    assert M.column(0) == [Scalar(1), Scalar(0), Scalar(0)]
    assert list(M.trusted_cols) == [0, 1, 2]
    assert M.max_abs() == 1.0
