from fractions import Fraction

import pytest

from troplib import exactnum as xn
from troplib.curve import CurveMap, Edge, MetricGraph, Plane
from troplib.torus import Polarization, TropicalTorus


def circle(length=1):
    half = Fraction(length) / 2
    return MetricGraph(("a", "b"), (Edge("a", "b", half), Edge("b", "a", half)))


def theta_graph(l1=3, l2=5, l3=7, signs=(1, 1, 1)):
    lens = (l1, l2, l3)
    return MetricGraph(("v1", "v2"), tuple(Edge("v1", "v2", l, 1, s) for l, s in zip(lens, signs)))


def tripod():
    g = MetricGraph((0,), (Edge(0, None, None), Edge(0, None, None), Edge(0, None, None)))
    return CurveMap(g, Plane(2), {0: (0, 0)}, ((1, 0), (0, 1), (-1, -1)))


def mixed_symbols():
    return xn.SymbolSet.create({"l1": ("2.99", "3.01"), "l2": ("4.99", "5.01"), "l3": ("6.99", "7.01")})


def unit_square():
    return TropicalTorus.rational([[1, 0], [0, 1]])


@pytest.fixture
def square():
    return unit_square()


@pytest.fixture
def square_pol():
    return Polarization(unit_square(), ((1, 0), (0, 1)))
