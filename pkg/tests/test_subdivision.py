from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from troplib import subdivision as sd


def test_lower_facets_of_flat_square():
    facets = sd.lower_facets([(0, 0), (1, 0), (0, 1), (1, 1)], [0, 0, 0, 0])
    assert facets == [((0, 1, 2, 3), (0, 0), 0)]


def test_lower_facets_split_a_lifted_square():
    facets = sd.lower_facets([(0, 0), (1, 0), (0, 1), (1, 1)], [0, 0, 0, 1])
    assert sorted(on for on, _, _ in facets) == [(0, 1, 2), (1, 2, 3)]


def test_volume_and_hull():
    square = [(0, 0), (2, 0), (0, 2), (2, 2), (1, 1)]
    assert sd.volume(square) == 4
    assert sd.hull_vertices(square) == [(0, 0), (0, 2), (2, 0), (2, 2)]
    assert sd.volume([(0, 0), (1, 1), (2, 2)]) == 0


def test_lattice_points_of_a_triangle():
    pts = sd.lattice_points_in_simplex([(0, 0), (2, 0), (0, 2)])
    assert sorted(pts) == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (2, 0)]


def test_barycentric_membership():
    tri = [(0, 0), (1, 0), (0, 1)]
    assert sd.barycentric((Fraction(1, 3), Fraction(1, 3)), tri) == (Fraction(1, 3), Fraction(1, 3))
    assert sd.barycentric((1, 1), tri) is None


points = st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=3, max_size=8, unique=True)


@given(points, st.data())
@settings(max_examples=60, deadline=None)
def test_regular_subdivision_tiles_the_hull(pts, data):
    if sd.affine_dim(pts) < 2:
        return
    heights = [data.draw(st.integers(0, 5)) for _ in pts]
    facets = sd.lower_facets(pts, heights)
    total = sum(sd.volume([pts[i] for i in on]) for on, _, _ in facets)
    assert total == sd.volume(pts)
    for on, a, b in facets:
        for i, (p, h) in enumerate(zip(pts, heights)):
            gap = h - (a[0] * p[0] + a[1] * p[1] + b)
            assert gap >= 0 and (gap == 0) == (i in on)
