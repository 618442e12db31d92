from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from troplib import exactnum as xn
from troplib.errors import IndeterminateSign, InputError, SingularMatrix
from troplib.exactnum import Sign

small = st.integers(-6, 6)
rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def square_matrices(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)


def test_as_rational_accepts_decimal_strings_and_fractions():
    assert xn.as_rational("0.1") == Fraction(1, 10)
    assert xn.as_rational("-3/4") == Fraction(-3, 4)
    assert xn.as_rational(7) == 7
    assert xn.fmt_rational(Fraction(6, 4)) == "3/2"


def test_as_rational_rejects_floats():
    with pytest.raises(InputError):
        xn.as_rational(0.1)


def test_primitive_and_content():
    assert xn.primitive((4, -6)) == ((2, -3), 2)
    assert xn.content((0, 0, 9)) == 9
    assert xn.rational_content((Fraction(1, 2), Fraction(3, 4))) == ((2, 3), Fraction(1, 4))


def test_hnf_and_lattice_membership():
    L = ((2, 1), (0, 3))
    assert xn.lattice_solve(L, (3, 3)) == (1, 1)
    assert xn.lattice_solve(L, (1, 0)) is None
    H = xn.hnf(L)
    assert xn.lattice_solve(H, (2, 0)) is not None
    assert xn.lattice_solve(H, (3, 3)) is not None


def test_reduce_mod_lattice_lands_in_unit_box():
    r = xn.reduce_mod_lattice(((1, 0), (0, 1)), (Fraction(7, 3), Fraction(-1, 4)))
    assert r == (Fraction(1, 3), Fraction(3, 4))


def test_singular_inverse_raises():
    with pytest.raises(SingularMatrix):
        xn.inverse(((1, 2), (2, 4)))


def test_sign_certification_with_symbols():
    S = xn.SymbolSet.create({"a": ("1.9", "2.1"), "b": ("2.9", "3.1")})
    a, b = S.symbol("a"), S.symbol("b")
    assert xn.sign_of(b - a) is Sign.POSITIVE
    assert xn.sign_of(a * a - 3) is Sign.POSITIVE
    assert xn.sign_of(a - a) is Sign.ZERO


def test_sign_is_indeterminate_when_enclosures_overlap():
    S = xn.SymbolSet.create({"a": ("1", "3"), "b": ("1", "3")})
    with pytest.raises(IndeterminateSign):
        xn.sign_of(S.symbol("a") - S.symbol("b"))


def test_symbolic_determinant_is_a_polynomial():
    S = xn.SymbolSet.create({"x": ("1", "2")})
    x = S.symbol("x")
    d = xn.det(((x, 1), (1, x)))
    assert d.evaluate((Fraction(3, 2),)) == Fraction(5, 4)


@given(square_matrices(3), square_matrices(3))
@settings(max_examples=60, deadline=None)
def test_det_is_multiplicative(a, b):
    assert xn.det(xn.matmul(a, b)) == xn.det(a) * xn.det(b)


@given(square_matrices(3))
@settings(max_examples=60, deadline=None)
def test_inverse_is_two_sided(a):
    if xn.det(a) == 0:
        return
    inv = xn.inverse(a)
    assert xn.mat_equal(xn.matmul(a, inv), xn.identity(3))
    assert xn.mat_equal(xn.matmul(inv, a), xn.identity(3))


@given(st.lists(small, min_size=2, max_size=4).filter(any))
def test_primitive_times_content_recovers_vector(v):
    u, c = xn.primitive(v)
    assert tuple(c * x for x in u) == tuple(v)
    assert xn.content(u) == 1


@given(square_matrices(2), st.tuples(rationals, rationals))
@settings(max_examples=80, deadline=None)
def test_reduction_differs_by_a_lattice_vector(L, v):
    if xn.det(L) == 0:
        return
    r = xn.reduce_mod_lattice(L, v)
    assert xn.lattice_solve(L, xn.vec_sub(v, r)) is not None
    assert xn.reduce_mod_lattice(L, r) == r
