from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from troplib import exactnum as xn
from troplib.errors import HypothesisFailed, InputError, NonzeroDegree
from troplib.torus import (
    NoPolarizationCertificate,
    Polarization,
    TropicalTorus,
    ZeroCycle,
    albanese_of_cycle,
    find_polarization,
    integration_pairing,
    no_curve_certificate,
)

from conftest import unit_square

coords = st.fractions(min_value=-3, max_value=3, max_denominator=10)


def _symmetric_torus(lo, hi):
    S = xn.SymbolSet.create({"a": lo[0:2], "b": lo[2:4], "c": hi})
    a, b, c = S.symbol("a"), S.symbol("b"), S.symbol("c")
    return TropicalTorus(((a, b), (b, c)), S, True)


def test_reduce_and_congruence():
    T = TropicalTorus.rational([[2, 1], [0, 1]])
    assert T.congruent((0, 0), (3, 1))
    assert not T.congruent((0, 0), (1, 0))
    assert T.contains_lattice_vector((2, 0))


def test_albanese_of_translate_relation():
    T = unit_square()
    cyc = ZeroCycle.of([((Fraction(1, 2), 0), 2), ((0, 0), -2)])
    assert albanese_of_cycle(T, cyc).is_zero()
    cyc = ZeroCycle.of([((Fraction(1, 3), 0), 1), ((0, 0), -1)])
    assert albanese_of_cycle(T, cyc).vector == (Fraction(1, 3), 0)


def test_albanese_needs_degree_zero():
    with pytest.raises(NonzeroDegree):
        albanese_of_cycle(unit_square(), ZeroCycle.of([((0, 0), 1)]))


def test_integration_pairing():
    T = TropicalTorus.rational([[2, 1], [0, 3]])
    assert integration_pairing(T, (1, 0), (1, 1)) == 2
    assert integration_pairing(T, (0, 1), (1, 1)) == 4


def test_polarization_rejects_non_symmetric_form():
    with pytest.raises(InputError):
        Polarization(unit_square(), ((1, 1), (0, 1)))


def test_rational_polarization_found():
    T = TropicalTorus.rational([[2, 1], [1, 3]])
    pol = find_polarization(T)
    assert isinstance(pol, Polarization)
    assert xn.is_positive_definite(xn.matmul(pol.A, T.rational_M()))


def test_rational_indefinite_torus_can_still_be_polarized():
    # A = diag(1, -1) turns diag(1, -1) into the identity form
    T = TropicalTorus.rational([[1, 0], [0, -1]])
    pol = find_polarization(T)
    assert isinstance(pol, Polarization)


def test_definite_irrational_torus_is_polarized_by_identity():
    T = _symmetric_torus(("2", "3", "0.1", "0.2"), ("2", "3"))
    pol = find_polarization(T)
    assert isinstance(pol, Polarization)
    assert pol.A == ((1, 0), (0, 1))


def test_indefinite_irrational_torus_has_no_polarization_and_no_curves():
    T = _symmetric_torus(("1", "1.1", "2", "2.1"), ("1", "1.1"))
    res = find_polarization(T)
    assert isinstance(res, NoPolarizationCertificate)
    cert = no_curve_certificate(T)
    assert set(cert.hypotheses) == {"irrational_symmetric", "invertible", "indefinite"}


def test_no_curve_certificate_rejects_definite_torus():
    T = _symmetric_torus(("2", "3", "0.1", "0.2"), ("2", "3"))
    with pytest.raises(HypothesisFailed) as exc:
        no_curve_certificate(T)
    assert exc.value.hypothesis == "indefinite"


def test_torus_json_round_trip():
    T = _symmetric_torus(("1", "1.1", "2", "2.1"), ("1", "1.1"))
    back = TropicalTorus.from_json(T.to_json())
    assert back.irrational_symmetric
    assert back.to_json() == T.to_json()


@given(st.tuples(coords, coords), st.tuples(st.integers(-3, 3), st.integers(-3, 3)))
def test_reduction_is_lattice_invariant(p, m):
    T = TropicalTorus.rational([[2, 1], [1, 3]])
    shifted = xn.vec_add(p, T.lattice_vector(m))
    assert T.reduce(shifted) == T.reduce(p)
