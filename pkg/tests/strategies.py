"""Random metric graphs, PL functions and divisors shared by property tests."""

import math
from fractions import Fraction

from hypothesis import strategies as st

from troplib.curve import Divisor, Edge, EdgePiece, GraphPoint, MetricGraph, PLFunction

lengths = st.fractions(min_value=Fraction(1, 4), max_value=3, max_denominator=6).filter(lambda x: x > 0)


@st.composite
def graphs(draw, max_edges=6):
    n = draw(st.integers(1, 4))
    edges = []
    for v in range(1, n):
        edges.append((draw(st.integers(0, v - 1)), v))
    extra = draw(st.integers(1 if n == 1 else 0, max_edges - len(edges)))
    for _ in range(extra):
        edges.append((draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1))))
    order = draw(st.permutations(range(len(edges))))
    return MetricGraph(
        tuple(f"v{i}" for i in range(n)),
        tuple(Edge(f"v{edges[i][0]}", f"v{edges[i][1]}", draw(lengths)) for i in order),
    )


@st.composite
def pl_functions(draw, g):
    values = {v: Fraction(draw(st.integers(-8, 8)), draw(st.integers(1, 4))) for v in g.vertices}
    values[g.vertices[0]] = Fraction(0)
    pieces = []
    for e in g.edges:
        rise = values[e.head] - values[e.tail]
        ratio = rise / e.length
        if ratio.denominator == 1 and draw(st.booleans()):
            pieces.append(EdgePiece((), (int(ratio),)))
            continue
        s1 = math.floor(ratio) + 1 + draw(st.integers(0, 2))
        s2 = math.ceil(ratio) - 1 - draw(st.integers(0, 2))
        b = (rise - s2 * e.length) / (s1 - s2)
        pieces.append(EdgePiece((b,), (s1, s2)))
    return PLFunction(values, tuple(pieces))


@st.composite
def points(draw, g):
    if draw(st.booleans()):
        return GraphPoint(vertex=draw(st.sampled_from(g.vertices)))
    i = draw(st.integers(0, len(g.edges) - 1))
    L = g.edges[i].length
    t = draw(st.integers(1, 11)) * L / 12
    return GraphPoint.on_edge(i, t)


@st.composite
def divisors(draw, g, degree=0, size=3):
    terms = [(draw(points(g)), draw(st.integers(-2, 2))) for _ in range(size)]
    D = Divisor.of(g, terms)
    fix = degree - D.degree()
    return D + Divisor.of(g, [(GraphPoint(vertex=g.vertices[0]), fix)])
