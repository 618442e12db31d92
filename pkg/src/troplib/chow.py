"""Tropical 0-cycles on tori and checkable certificates of their linear equivalence."""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm

from . import exactnum as xn
from .curve.divisors import Divisor, GraphPoint, PLFunction, linear_equivalence
from .curve.graph import CurveMap, Cylinder, Edge, MetricGraph, balancing_check
from .curve.jacobian import divide_class
from .errors import (
    InputError,
    NotOnCircle,
    SearchExhausted,
    SumMismatch,
    TropError,
    UnbalancedInput,
)
from .theta import GENERATOR, find_regular_theta, theta_curve_2d, through_two_points
from .torus import Polarization, TorusPoint, TropicalTorus, ZeroCycle, albanese_of_cycle


def degree(cycle: ZeroCycle) -> int:
    return cycle.degree()


def _combine(torus: TropicalTorus, pairs):
    """Reduce points modulo the lattice and merge multiplicities; zero terms dropped, sorted."""
    acc = defaultdict(int)
    for p, m in pairs:
        acc[torus.reduce(p)] += int(m)
    return tuple(sorted((p, m) for p, m in acc.items() if m))


@dataclass(frozen=True)
class EquivalenceCertificate:
    """A balanced curve in ``R x B`` whose vertical ends certify ``sum negative ~ sum positive``."""

    curve: CurveMap
    negative: tuple  # ((coords in B, weight), ...)
    positive: tuple
    trivalent: bool = False
    provenance: tuple = ()
    claim: dict = field(default=None, compare=False)

    @property
    def torus(self) -> TropicalTorus:
        return self.curve.target.torus

    def window(self):
        hs = [self.curve.images[v][0] for v in self.curve.graph.vertices]
        return (min(hs), max(hs)) if hs else (Fraction(0), Fraction(0))

    def relation(self) -> ZeroCycle:
        """``sum positive - sum negative`` as a 0-cycle on ``B``."""
        return ZeroCycle.of([(p, w) for p, w in self.positive] + [(p, -w) for p, w in self.negative])

    def to_json(self):
        lo, hi = self.window()
        out = {
            "kind": "EquivalenceCertificate",
            "curve": self.curve.to_json(),
            "ends": {
                "negative": [{"point": [xn.fmt_rational(c) for c in p], "weight": w} for p, w in self.negative],
                "positive": [{"point": [xn.fmt_rational(c) for c in p], "weight": w} for p, w in self.positive],
            },
            "window": [xn.fmt_rational(lo), xn.fmt_rational(hi)],
            "trivalent": self.trivalent,
            "provenance": list(self.provenance),
        }
        if self.claim is not None:
            out["claim"] = self.claim
        return out


# ---------------------------------------------------------------- graph construction


class _Builder:
    def __init__(self, torus):
        self.torus = torus
        self.vertices, self.images, self.edges, self.dirs = [], {}, [], []

    def vertex(self, name, image):
        self.vertices.append(name)
        self.images[name] = xn.as_vector(image)
        return name

    def edge(self, tail, head, length, vector, sign=1):
        u, w = xn.primitive(vector)
        self.edges.append(Edge(tail, head, length, w, sign))
        self.dirs.append(u)

    def ray(self, tail, vector):
        u, w = xn.primitive(vector)
        self.edges.append(Edge(tail, None, None, w, 1))
        self.dirs.append(u)

    def build(self):
        graph = MetricGraph(tuple(self.vertices), tuple(self.edges))
        return CurveMap(graph, Cylinder(self.torus), self.images, tuple(self.dirs))


def _vertical(n, s):
    return (s,) + (0,) * n


def _pieces(f: PLFunction, i, length):
    """Maximal linear pieces ``(start, end, slope)`` of ``f`` along edge ``i``."""
    pc = f.pieces[i]
    cuts = [Fraction(0)] + list(pc.breakpoints) + [length]
    out = []
    for a, b, s in zip(cuts, cuts[1:], pc.slopes):
        if out and out[-1][2] == s:
            out[-1] = (out[-1][0], b, s)
        else:
            out.append((a, b, s))
    return out


def _add_lines(builder: _Builder, torus, points, tag):
    """Product lines ``R x {p}`` (weight ``m``) realizing the trivial relation ``m[p] ~ m[p]``."""
    n = torus.n
    for j, (p, m) in enumerate(points):
        v = builder.vertex(f"{tag}{j}", (Fraction(0),) + tuple(p))
        builder.ray(v, xn.vec_scale(m, _vertical(n, -1)))
        builder.ray(v, xn.vec_scale(m, _vertical(n, 1)))


def graph_construction(c: CurveMap, f: PLFunction, provenance=(), extra_lines=()) -> EquivalenceCertificate:
    """Graph of ``(f, h)`` in ``R x B`` with vertical rays at the points of ``div f``.

    A point with ``n_p > 0`` gets a downward ray of weight ``n_p`` (a negative
    end); ``n_p < 0`` gives an upward ray (a positive end).  ``extra_lines``
    adds product lines ``R x {p}`` for points appearing on both sides.
    """
    torus = c.target
    if not isinstance(torus, TropicalTorus):
        raise InputError("graph construction needs a curve in a torus")
    if not c.graph.is_compact():
        raise InputError("graph construction needs a compact curve")
    if any(e.sign != 1 for e in c.graph.edges):
        raise InputError("graph construction needs an effective curve")
    if not balancing_check(c).balanced:
        raise UnbalancedInput("the input curve is not balanced")
    f.validate(c.graph)
    c.check_compatible()
    n = torus.n
    b = _Builder(torus)
    names = {}
    for v in c.graph.vertices:
        names[v] = b.vertex(f"v{v}", (f.vertex_values[v],) + c.images[v])
    mult = defaultdict(int)
    for i, e in enumerate(c.graph.edges):
        length = c.graph.length(i)
        u = c.directions[i]
        pieces = _pieces(f, i, length)
        val = f.vertex_values[e.tail]
        prev = names[e.tail]
        mult[prev] += pieces[0][2]
        for j, (s0, s1, slope) in enumerate(pieces):
            if j + 1 < len(pieces):
                head = b.vertex(f"e{i}.{j}", (val + slope * (s1 - s0),) + c.point_image(i, s1))
                mult[head] += pieces[j + 1][2] - slope
            else:
                head = names[e.head]
                mult[head] -= slope
            b.edge(prev, head, s1 - s0, (slope,) + tuple(e.weight * x for x in u))
            val += slope * (s1 - s0)
            prev = head
    negative, positive = [], []
    for v, m in mult.items():
        if m == 0:
            continue
        b.ray(v, xn.vec_scale(abs(m), _vertical(n, -1 if m > 0 else 1)))
        (negative if m > 0 else positive).append((b.images[v][1:], abs(m)))
    _add_lines(b, torus, extra_lines, "line")
    negative += [(tuple(p), m) for p, m in extra_lines]
    positive += [(tuple(p), m) for p, m in extra_lines]
    curve = b.build()
    if not balancing_check(curve).balanced:
        raise AssertionError("graph construction produced an unbalanced curve")
    trivalent = all(curve.graph.valency(v) == 3 for v in curve.graph.vertices)
    return EquivalenceCertificate(
        curve, _combine(torus, negative), _combine(torus, positive), trivalent, tuple(provenance)
    )


# ---------------------------------------------------------------- verification


@dataclass(frozen=True)
class VerificationReport:
    checks: dict
    error: str = ""

    @property
    def ok(self):
        return not self.error and all(self.checks.values())

    def to_json(self):
        out = {"verified": self.ok, "checks": self.checks}
        if self.error:
            out["error"] = self.error
        return out


_MALFORMED = (TropError, AttributeError, IndexError, KeyError, TypeError, ValueError, ZeroDivisionError)


def verify_certificate(data) -> VerificationReport:
    """Re-check a certificate from its JSON alone; provenance is never read."""
    if isinstance(data, EquivalenceCertificate):
        data = data.to_json()
    try:
        curve = CurveMap.from_json(data["curve"])
    except _MALFORMED as exc:
        return VerificationReport({"parse": False}, f"{type(exc).__name__}: {exc}")
    checks = {}
    try:
        return _verify(data, curve, checks)
    except _MALFORMED as exc:
        return VerificationReport(dict(checks, parse=False), f"{type(exc).__name__}: {exc}")


def _verify(data, curve, checks):
    target = curve.target
    checks["cylinder_target"] = isinstance(target, Cylinder)
    if not checks["cylinder_target"]:
        return VerificationReport(checks)
    torus = target.torus
    n = torus.n
    checks["compatible"] = not curve.incompatible_edges()
    checks["balanced"] = balancing_check(curve).balanced
    checks["effective"] = all(e.sign == 1 for e in curve.graph.edges)
    found_neg, found_pos = [], []
    vertical = True
    for i, e in enumerate(curve.graph.edges):
        if not e.is_ray:
            continue
        u = curve.directions[i]
        if u == _vertical(n, -1):
            found_neg.append((curve.images[e.tail][1:], e.weight))
        elif u == _vertical(n, 1):
            found_pos.append((curve.images[e.tail][1:], e.weight))
        else:
            vertical = False
    checks["rays_vertical"] = vertical
    ends = data.get("ends", {})
    declared_neg = [(xn.as_vector(t["point"]), int(t["weight"])) for t in ends.get("negative", [])]
    declared_pos = [(xn.as_vector(t["point"]), int(t["weight"])) for t in ends.get("positive", [])]
    checks["ends_match"] = _combine(torus, found_neg) == _combine(torus, declared_neg) and _combine(
        torus, found_pos
    ) == _combine(torus, declared_pos)
    deg_neg = sum(w for _, w in declared_neg)
    deg_pos = sum(w for _, w in declared_pos)
    checks["degrees_equal"] = deg_neg == deg_pos
    if checks["degrees_equal"]:
        rel = ZeroCycle.of(declared_pos + [(p, -w) for p, w in declared_neg])
        checks["albanese_zero"] = albanese_of_cycle(torus, rel).is_zero()
    else:
        checks["albanese_zero"] = False
    if data.get("trivalent"):
        checks["trivalent"] = all(curve.graph.valency(v) == 3 for v in curve.graph.vertices)
    claim = data.get("claim")
    if claim:
        k = int(claim["k"])
        expect = [(xn.as_vector(t["point"]), k * int(t["mult"])) for t in claim["a"]]
        expect += [(xn.as_vector(claim["b0"]), 1), (xn.as_vector(claim["b"]), -1)]
        checks["claim_matches_ends"] = _combine(torus, expect) == _combine(
            torus, declared_neg + [(p, -w) for p, w in declared_pos]
        )
    return VerificationReport(checks)


# ---------------------------------------------------------------- divisibility pipeline


def _random_point(rng, torus):
    M = torus.rational_M()
    frac = tuple(Fraction(rng.randrange(1, 997), 997) for _ in range(torus.n))
    return xn.matvec(M, frac)


def _divide_hop(curve0: CurveMap, b0, b, k, provenance, max_k):
    marked = through_two_points(curve0, b0, b, max_k=max_k)
    curve = marked.curve
    g = curve.graph
    (e0, o0), (e1, o1) = marked.marks
    p0, p = GraphPoint.on_edge(e0, o0), GraphPoint.on_edge(e1, o1)
    target = Divisor.of(g, [(p, 1), (p0, -1)])
    a = divide_class(g, target, k)
    witness = linear_equivalence(g, k * a, target)
    if not isinstance(witness, PLFunction):
        raise AssertionError("divided class failed verification")
    pushed = []
    for q, m in a.terms:
        img = curve.images[q.vertex] if q.is_vertex else curve.point_image(q.edge, q.offset)
        pushed.append((curve.target.reduce(img), m))
    steps = tuple(provenance) + (
        {"step": "through_two_points", "tau": [xn.fmt_rational(c) for c in marked.tau], "densification": marked.k},
        {"step": "divide_class", "k": k, "support": len(a.terms)},
        {"step": "graph_construction"},
    )
    cert = graph_construction(curve, witness, steps)
    claim = {
        "k": k,
        "a": [{"point": [xn.fmt_rational(c) for c in p_], "mult": m} for p_, m in pushed],
        "b": [xn.fmt_rational(c) for c in b],
        "b0": [xn.fmt_rational(c) for c in b0],
    }
    return EquivalenceCertificate(cert.curve, cert.negative, cert.positive, cert.trivalent, cert.provenance, claim)


def divide_cycle(pol: Polarization, b, b0, k: int, seed: int, max_k: int = 6, hops: int = 8):
    """Certificates that ``k h_* a ~ [b] - [b0]`` for a 0-cycle ``a`` pushed from a theta curve.

    A direct hop is tried first; if the two-point search fails, an intermediate
    point ``b3`` drawn from the seeded generator splits the relation in two.
    """
    torus = pol.torus
    if torus.n != 2:
        raise InputError("divide_cycle works on 2-tori")
    if k <= 0:
        raise InputError("k must be a positive integer")
    b = torus.reduce(xn.as_vector(b))
    b0 = torus.reduce(xn.as_vector(b0))
    if b == b0:
        raise InputError("b and b0 must differ")
    found = find_regular_theta(pol, seed)
    curve0 = theta_curve_2d(found.theta, found.subdivision)
    base = (
        {"step": "find_regular_theta", "seed": seed, "generator": GENERATOR, "k": found.theta.k,
         "delta": found.theta.to_json()["delta"]},
        {"step": "theta_curve_2d", "vertices": len(curve0.graph.vertices), "edges": len(curve0.graph.edges)},
    )
    try:
        return [_divide_hop(curve0, b0, b, k, base, max_k)]
    except SearchExhausted:
        pass
    rng = random.Random(seed)
    for _ in range(hops):
        b3 = torus.reduce(_random_point(rng, torus))
        if b3 in (b, b0):
            continue
        try:
            first = _divide_hop(curve0, b0, b3, k, base + ({"step": "two_hop", "b3": [xn.fmt_rational(c) for c in b3]},), max_k)
            second = _divide_hop(curve0, b3, b, k, base + ({"step": "two_hop", "b3": [xn.fmt_rational(c) for c in b3]},), max_k)
        except SearchExhausted:
            continue
        return [first, second]
    raise SearchExhausted("no direct or two-hop route found")


# ---------------------------------------------------------------- fixed sum on circles


def _circle_period(torus, u):
    """Least ``t0 > 0`` with ``t0 u`` in the period lattice."""
    w = xn.solve(torus.rational_M(), u)
    D = lcm(*(c.denominator for c in w))
    z = [int(c * D) for c in w]
    return Fraction(D, gcd(*z))


def _circle_coordinate(torus, origin, u, t0, x):
    """``t`` in ``[0, t0)`` with ``x = origin + t u`` modulo the lattice, or ``None``."""
    M = torus.rational_M()
    w = xn.solve(M, u)
    y = xn.solve(M, xn.vec_sub(x, origin))
    i = next(j for j, c in enumerate(w) if c != 0)
    span = int(abs(t0 * w[i])) + 2
    base = y[i] - (y[i] // 1)
    for m in range(-span, span + 1):
        t = (base + m) / w[i]
        if 0 <= t < t0 and all((yy - t * ww).denominator == 1 for yy, ww in zip(y, w)):
            return t
    return None


def fixed_sum_relation(torus: TropicalTorus, a, b, c, d, u) -> EquivalenceCertificate:
    """Certificate of ``[a] + [b] ~ [c] + [d]`` for four points on one rational-slope circle."""
    u = tuple(int(x) for x in u)
    if len(u) != torus.n or xn.content(u) != 1:
        raise InputError("u must be a primitive integer vector")
    pts = [torus.reduce(xn.as_vector(p)) for p in (a, b, c, d)]
    t0 = _circle_period(torus, u)
    ts = []
    for name, p in zip("abcd", pts):
        t = _circle_coordinate(torus, pts[0], u, t0, p)
        if t is None:
            raise NotOnCircle(f"point {name} is not on the circle through a with direction {list(u)}")
        ts.append(t)
    if (ts[0] + ts[1] - ts[2] - ts[3]) % t0 != 0:
        raise SumMismatch("t_a + t_b and t_c + t_d differ modulo the circle period")
    # put the circle's vertex in the middle of a gap so every marked point is interior
    distinct = sorted(set(ts))
    gaps = [(distinct[(j + 1) % len(distinct)] - s) % t0 or t0 for j, s in enumerate(distinct)]
    j = max(range(len(gaps)), key=lambda i: (gaps[i], -i))
    start = distinct[j] + gaps[j] / 2
    origin = torus.reduce(xn.vec_add(pts[0], xn.vec_scale(start, u)))
    graph = MetricGraph(("o",), (Edge("o", "o", t0),))
    circle = CurveMap(graph, torus, {"o": origin}, (u,))
    offsets = [(t - start) % t0 for t in ts]
    gp = [GraphPoint.on_edge(0, o) for o in offsets]
    D1 = Divisor.of(graph, [(gp[0], 1), (gp[1], 1)])
    D2 = Divisor.of(graph, [(gp[2], 1), (gp[3], 1)])
    witness = linear_equivalence(graph, D1, D2)
    if not isinstance(witness, PLFunction):
        raise SumMismatch("the two pairs are not linearly equivalent on the circle")
    common = defaultdict(int)
    d1, d2 = D1.as_dict(), D2.as_dict()
    for q in d1:
        if q in d2:
            common[q] = min(d1[q], d2[q])
    lines = [(circle.point_image(0, q.offset), m) for q, m in common.items()]
    steps = (
        {"step": "circle", "direction": list(u), "period": xn.fmt_rational(t0)},
        {"step": "linear_equivalence", "coordinates": [xn.fmt_rational(t) for t in ts]},
        {"step": "graph_construction"},
    )
    return graph_construction(circle, witness, steps, extra_lines=[(torus.reduce(p), m) for p, m in lines])
