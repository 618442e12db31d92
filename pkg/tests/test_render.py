from fractions import Fraction

import pytest

from troplib.curve import CurveMap, Edge, MetricGraph, Plane
from troplib.errors import InputError, UnsupportedDimension
from troplib.render import fmt, parse_window, render
from troplib.theta import find_regular_theta, theta_curve_2d

from conftest import tripod


def test_fixed_precision_formatting():
    assert fmt(Fraction(1, 3)) == "0.333333333333"
    assert fmt(Fraction(2, 3)) == "0.666666666667"
    assert fmt(-Fraction(1, 8)) == "-0.125000000000"
    assert fmt(0) == "0.000000000000"
    assert fmt(Fraction(-1, 10**14)) == "0.000000000000"


def test_tripod_svg():
    svg = render(tripod())
    assert svg.count("<line") == 3
    assert svg.count("<circle") == 1
    assert svg.count('marker-end="url(#arrow)"') == 3
    assert "<text" not in svg.split("<g font-size")[1].split("</g>")[0]


def test_rays_clipped_to_window():
    svg = render(tripod(), parse_window("-2,-2,2,2"))
    assert 'x2="400.000000000000"' in svg
    assert 'y2="0.000000000000"' in svg


def test_weight_labels():
    g = MetricGraph((0,), (Edge(0, None, None, 2), Edge(0, None, None, 2), Edge(0, None, None, 2)))
    c = CurveMap(g, Plane(2), {0: (0, 0)}, ((1, 0), (0, 1), (-1, -1)))
    assert render(c).count("<text") == 3


def test_three_dimensional_curve_rejected():
    g = MetricGraph((0,), (Edge(0, None, None),))
    c = CurveMap(g, Plane(3), {0: (0, 0, 0)}, ((1, 0, 0),))
    with pytest.raises(UnsupportedDimension):
        render(c)


def test_bad_window_rejected():
    with pytest.raises(InputError):
        parse_window("0,0,0,1")


def test_theta_curve_svg_is_deterministic(square_pol):
    res = find_regular_theta(square_pol, seed=7)
    c = theta_curve_2d(res.theta, res.subdivision)
    a = render(c)
    b = render(theta_curve_2d(find_regular_theta(square_pol, seed=7).theta, res.subdivision))
    assert a == b
    assert a.count("<circle") == 8
    assert "marker-end" not in a


def test_subdivision_svg(square_pol):
    res = find_regular_theta(square_pol, seed=7)
    svg = render(res.subdivision)
    assert svg.count('class="cell"') > 0
    assert svg.startswith("<?xml")
