from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from troplib.curve import balancing_check
from troplib.errors import DegenerateSupport, ParseError, UnsupportedDimension, ZeroCoordinate, ZeroPolynomial
from troplib.novikov import (
    INFINITY,
    NovikovPolynomial,
    NovikovScalar,
    format_polynomial,
    gauss_norm,
    parse_polynomial,
    parse_scalar,
    polytope_valuation,
    trop_hypersurface,
    trop_point,
    tropical_value,
    val,
)

F = Fraction
S = NovikovScalar

exponents = st.fractions(min_value=-3, max_value=3, max_denominator=6)
coefficients = st.fractions(min_value=-5, max_value=5, max_denominator=4)
scalars = st.lists(st.tuples(exponents, coefficients), max_size=4).map(S.of)
nonzero = scalars.filter(lambda x: not x.is_zero())


def test_valuation_basics():
    assert val(S.of([(F(1, 2), 1), (2, 3)])) == F(1, 2)
    assert val(S()) == INFINITY
    assert val(S.const(5)) == 0
    assert val(S.q(-2, 7)) == -2


def test_leading_terms_can_cancel():
    x = S.of([(0, 1), (1, 1)])
    assert val(x - 1) == 1
    assert val(x * (S.const(1) - S.q(1))) == 0
    assert (x * (S.const(1) - S.q(1))).terms == ((0, 1), (2, -1))


def test_gauss_norm_and_polytope_valuation():
    F_ = parse_polynomial("q^3*x1*x2^(-1) + q^(1/2)*x2")
    assert gauss_norm(F_) == F(1, 2)
    square = [(0, 0), (1, 0), (0, 1), (1, 1)]
    assert polytope_valuation(parse_polynomial("x1", 2), square) == 0
    assert polytope_valuation(parse_polynomial("x1^(-1)", 2), square) == -1
    assert polytope_valuation(parse_polynomial("q^2 + q*x1*x2", 2), square) == 1


def test_zero_polynomial_errors():
    with pytest.raises(ZeroPolynomial):
        gauss_norm(parse_polynomial("x - x"))
    with pytest.raises(ZeroPolynomial):
        trop_hypersurface(parse_polynomial("0", 2))


def test_trop_point():
    assert trop_point([S.of([(3, 2), (4, 1)]), S.q(F(-1, 2))]) == (3, F(-1, 2))
    with pytest.raises(ZeroCoordinate):
        trop_point([S.const(1), S()])


def test_tropical_line_is_the_tripod():
    c = trop_hypersurface(parse_polynomial("x + y + 1"))
    assert list(c.images.values()) == [(0, 0)]
    assert sorted(c.directions) == [(-1, -1), (0, 1), (1, 0)]
    assert all(e.is_ray and e.weight == 1 for e in c.graph.edges)
    assert balancing_check(c).balanced


def test_shifted_line():
    c = trop_hypersurface(parse_polynomial("q*x + y + 1"))
    assert list(c.images.values()) == [(-1, 0)]


def test_conic_with_bounded_edges():
    c = trop_hypersurface(parse_polynomial("1 + x + y + q*x*y + x^2 + q^3*y^2"))
    assert balancing_check(c).balanced
    assert sorted(c.images.values()) == [(-1, -3), (-1, -2), (0, 0)]
    assert sum(1 for e in c.graph.edges if not e.is_ray) == 2
    assert sum(e.weight for e in c.graph.edges if e.is_ray) == 6


def test_double_line_has_weight_two():
    c = trop_hypersurface(parse_polynomial("1 + x^2 + y^2"))
    assert {e.weight for e in c.graph.edges} == {2}


def test_one_variable_bend_points():
    (bend,) = trop_hypersurface(parse_polynomial("x + q*x^2"))
    assert (bend.point, bend.weight) == (-1, 1)
    pts = trop_hypersurface(parse_polynomial("1 + q^2*x^3"))
    assert [(p.point, p.weight) for p in pts] == [(F(-2, 3), 3)]


def test_single_term_has_empty_locus():
    c = trop_hypersurface(parse_polynomial("q*x*y"))
    assert c.graph.vertices == () and c.graph.edges == ()


def test_collinear_support_is_degenerate():
    with pytest.raises(DegenerateSupport):
        trop_hypersurface(parse_polynomial("1 + x*y"))


def test_three_variables_unsupported():
    with pytest.raises(UnsupportedDimension):
        trop_hypersurface(parse_polynomial("x + y + z + 1"))


def test_duality_at_generic_points():
    c = trop_hypersurface(parse_polynomial("1 + x + y + q*x*y + x^2 + q^3*y^2"))
    F_ = parse_polynomial("1 + x + y + q*x*y + x^2 + q^3*y^2")
    for v in c.graph.vertices:
        value, argmin = tropical_value(F_, c.images[v])
        assert len(argmin) >= 3


@pytest.mark.parametrize(
    "text,expected",
    [
        ("x1 + q*x2", "q*x2 + x1"),
        ("3/2*q^(1/2)*x1^2 + x2^(-1) - q", "x2^(-1) + -1*q + 3/2*q^(1/2)*x1^2"),
        ("(1+q)*(1-q)", "1 + -1*q^2"),
        ("x*y", "x1*x2"),
    ],
)
def test_printer_oracles(text, expected):
    assert format_polynomial(parse_polynomial(text)) == expected


@pytest.mark.parametrize("text", ["x1 +", "q^(1/0)", "2 * * x", "x1^(1/2)", "w + 1", ""])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_polynomial(text)


def test_scalar_parser():
    assert parse_scalar("q^(-1/3) + 2") == S.of([(F(-1, 3), 1), (0, 2)])
    with pytest.raises(ParseError):
        parse_scalar("x + 1")


@given(nonzero, nonzero)
@settings(max_examples=300)
def test_ultrametric_inequality(x, y):
    s = x + y
    assert val(s) >= min(val(x), val(y))
    if val(x) != val(y):
        assert val(s) == min(val(x), val(y))


@given(nonzero, nonzero)
@settings(max_examples=300)
def test_valuation_is_multiplicative(x, y):
    assert val(x * y) == val(x) + val(y)


monomials = st.tuples(st.integers(-2, 2), st.integers(-2, 2))
polynomials = st.lists(st.tuples(monomials, scalars), max_size=4).map(lambda ts: NovikovPolynomial.of(2, ts))


@given(polynomials)
@settings(max_examples=150)
def test_print_parse_round_trip(P):
    assert parse_polynomial(format_polynomial(P), 2) == P


@given(polynomials, polynomials)
@settings(max_examples=80)
def test_gauss_norm_is_multiplicative(P, Q):
    if P.is_zero() or Q.is_zero():
        return
    assert gauss_norm(P * Q) == gauss_norm(P) + gauss_norm(Q)


@given(st.lists(st.tuples(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(-3, 3)), min_size=3, max_size=7))
@settings(max_examples=80, deadline=None)
def test_tropicalizations_are_balanced(terms):
    P = NovikovPolynomial.of(2, [(a, S.q(lam)) for a, lam in terms])
    pts = P.support()
    from troplib.subdivision import affine_dim

    if affine_dim(pts) < 2:
        return
    c = trop_hypersurface(P)
    assert balancing_check(c).balanced
    for v in c.graph.vertices:
        _, argmin = tropical_value(P, c.images[v])
        assert len(argmin) >= 3
