from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from troplib import exactnum as xn
from troplib.curve import balancing_check
from troplib.errors import InputError
from troplib.theta import (
    GENERATOR,
    ThetaData,
    cells_embed,
    find_regular_theta,
    quasi_periodicity_defect,
    regular_subdivision,
    regularity_check,
    theta_curve_2d,
    theta_eval,
    through_two_points,
)
from troplib.torus import Polarization, TropicalTorus

F = Fraction

POLARIZED = [
    ([[1]], [[1]]),
    ([[2]], [[1]]),
    ([[1, 0], [0, 1]], [[1, 0], [0, 1]]),
    ([[2, 1], [1, 3]], [[1, 0], [0, 1]]),
    ([[1, 1], [0, 1]], [[1, 0], [1, 1]]),
    ([[2, 1], [0, 3]], [[3, -1], [0, 1]]),
]


def pol(M, A):
    return Polarization(TropicalTorus.rational(M), tuple(map(tuple, A)))


def identity():
    return pol([[1, 0], [0, 1]], [[1, 0], [0, 1]])


def test_theta_values_on_identity_torus():
    td = ThetaData(identity(), 1)
    assert theta_eval(td, (F(1, 2), F(1, 3))) == (0, ((0, 0), (1, 0)))
    assert theta_eval(td, (0, 0)) == (0, ((0, 0),))
    assert theta_eval(td, (F(1, 2), F(1, 2)))[1] == ((0, 0), (0, 1), (1, 0), (1, 1))
    assert theta_eval(td, (F(1, 4), 0)) == (0, ((0, 0),))
    assert theta_eval(td, (F(3, 4), 0)) == (F(1, 4), ((1, 0),))


def test_theta_on_circle_of_length_two():
    td = ThetaData(pol([[2]], [[1]]), 1)
    assert theta_eval(td, (F(1, 2),)) == (0, ((0,),))
    assert theta_eval(td, (1,)) == (0, ((0,), (1,)))


def test_delta_is_stored_on_coset_representatives():
    # (3, 0) and (1, 2) lie in the same coset of 2 Z^2, so their values add up
    td = ThetaData(identity(), 2, {(3, 0): F(1, 10), (1, 2): F(1, 5), (0, 1): F(1, 7)})
    assert dict(td.delta) == {(1, 0): F(3, 10), (0, 1): F(1, 7)}
    assert td.delta_of((5, 4)) == F(3, 10)
    assert td.delta_of((0, 0)) == 0


def test_identity_level_one_subdivision_is_the_unit_square():
    sub = regular_subdivision(ThetaData(identity(), 1))
    assert len(sub.cells) == 1
    (cell,) = sub.cells
    assert cell.points == ((0, 0), (0, 1), (1, 0), (1, 1))
    assert cell.dual == (F(1, 2), F(1, 2))
    report = regularity_check(sub)
    assert not report.regular and report.reason == "not a simplex"


def test_one_dimensional_search_stops_at_level_one():
    res = find_regular_theta(pol([[2]], [[1]]), seed=1)
    assert res.theta.k == 1
    assert res.generator == GENERATOR


def test_identity_search_finds_unimodular_triangulation():
    res = find_regular_theta(identity(), seed=7)
    sub = res.subdivision
    assert res.theta.k == 2
    assert len(sub.cells) == 8
    assert regularity_check(sub).regular
    assert cells_embed(sub)
    total = sum(abs(xn.det([xn.vec_sub(p, c.points[0]) for p in c.points[1:]])) for c in sub.cells)
    assert total / 2 == abs(xn.det(res.theta.translations))


def test_search_is_deterministic():
    a = find_regular_theta(identity(), seed=11).to_json()
    b = find_regular_theta(identity(), seed=11).to_json()
    assert a == b


def test_theta_curve_is_trivalent_and_balanced():
    res = find_regular_theta(identity(), seed=7)
    c = theta_curve_2d(res.theta, res.subdivision)
    assert len(c.graph.vertices) == 8
    assert len(c.graph.edges) == 12
    assert balancing_check(c).balanced
    assert all(c.graph.valency(v) == 3 for v in c.graph.vertices)
    assert c.incompatible_edges() == []


def test_theta_curve_on_skew_torus():
    p = pol([[2, 1], [1, 3]], [[1, 0], [0, 1]])
    res = find_regular_theta(p, seed=2)
    c = theta_curve_2d(res.theta, res.subdivision)
    assert balancing_check(c).balanced
    assert all(c.graph.valency(v) == 3 for v in c.graph.vertices)


def test_through_two_points_marks_both_points():
    res = find_regular_theta(identity(), seed=7)
    c = theta_curve_2d(res.theta, res.subdivision)
    for b in [(F(1, 2), 0), (F(1, 3), F(1, 7))]:
        marked = through_two_points(c, (0, 0), b)
        for (edge, offset), target in zip(marked.marks, [(0, 0), b]):
            e = marked.curve.graph.edges[edge]
            assert 0 < offset < e.length
            image = marked.curve.point_image(edge, offset)
            assert marked.curve.target.congruent(image, target)


def test_bad_level_rejected():
    with pytest.raises(InputError):
        ThetaData(identity(), 0)


def test_theta_json_round_trip():
    td = ThetaData(identity(), 2, {(1, 0): F(1, 10)})
    assert ThetaData.from_json(td.to_json()) == td


rat = st.fractions(min_value=-3, max_value=3, max_denominator=9)


@given(
    st.sampled_from(POLARIZED),
    st.integers(1, 3),
    st.lists(rat, min_size=2, max_size=2),
    st.lists(st.integers(-2, 2), min_size=2, max_size=2),
    st.lists(st.tuples(st.lists(st.integers(0, 5), min_size=2, max_size=2), st.fractions(0, F(1, 5), max_denominator=50)), max_size=3),
)
@settings(max_examples=150, deadline=None)
def test_quasi_periodicity_defect_vanishes(case, k, v, gamma, delta):
    M, A = case
    n = len(M)
    td = ThetaData(pol(M, A), k, {tuple(a[:n]): d for a, d in delta})
    assert quasi_periodicity_defect(td, v[:n], gamma[:n]) == 0


@given(
    st.sampled_from(POLARIZED),
    st.integers(1, 3),
    st.lists(rat, min_size=2, max_size=2),
    st.lists(st.tuples(st.lists(st.integers(0, 5), min_size=2, max_size=2), st.fractions(0, F(1, 2), max_denominator=50)), max_size=3),
)
@settings(max_examples=80, deadline=None)
def test_theta_eval_matches_brute_force(case, k, v, delta):
    import itertools

    M, A = case
    n = len(M)
    td = ThetaData(pol(M, A), k, {tuple(a[:n]): d for a, d in delta})
    v = v[:n]
    center = [round(c) for c in xn.vec_scale(k, xn.matvec(td.vector_gram, v))]
    vals = {}
    for alpha in itertools.product(*(range(c - 8, c + 9) for c in center)):
        vals[alpha] = xn._dot(alpha, v) - td.height(alpha)
    best = max(vals.values())
    assert theta_eval(td, v) == (best, tuple(sorted(a for a, x in vals.items() if x == best)))
