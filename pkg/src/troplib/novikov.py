"""Finite Novikov-field arithmetic, valuations and tropicalization of hypersurfaces.

Coefficients are rational; elements are finite sums ``c q^lambda``.  Valuations
use the min-plus convention.
"""

from __future__ import annotations

import itertools
import math
import re
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from . import exactnum as xn
from . import subdivision as sd
from .curve.graph import CurveMap, Edge, MetricGraph, Plane
from .errors import DegenerateSupport, InputError, ParseError, UnsupportedDimension, ZeroCoordinate, ZeroPolynomial

INFINITY = math.inf


@dataclass(frozen=True)
class NovikovScalar:
    """``sum c_j q^lambda_j`` with strictly increasing exponents and nonzero coefficients."""

    terms: tuple = ()

    @classmethod
    def of(cls, pairs):
        acc = defaultdict(Fraction)
        for lam, c in pairs:
            acc[xn.as_rational(lam)] += xn.as_rational(c)
        return cls(tuple(sorted((lam, c) for lam, c in acc.items() if c)))

    @classmethod
    def const(cls, c):
        return cls.of([(0, c)])

    @classmethod
    def q(cls, lam, c=1):
        return cls.of([(lam, c)])

    def is_zero(self):
        return not self.terms

    def val(self):
        return self.terms[0][0] if self.terms else INFINITY

    def is_unit(self):
        return self.val() == 0

    def __add__(self, other):
        other = _scalar(other)
        return NovikovScalar.of(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return NovikovScalar(tuple((lam, -c) for lam, c in self.terms))

    def __sub__(self, other):
        return self + (-_scalar(other))

    def __rsub__(self, other):
        return _scalar(other) - self

    def __mul__(self, other):
        other = _scalar(other)
        return NovikovScalar.of((l1 + l2, c1 * c2) for (l1, c1), (l2, c2) in itertools.product(self.terms, other.terms))

    __rmul__ = __mul__

    def __str__(self):
        return format_scalar(self)


def _scalar(x):
    if isinstance(x, NovikovScalar):
        return x
    return NovikovScalar.const(x)


def val(x) -> Fraction | float:
    """Least exponent; ``INFINITY`` for zero."""
    return _scalar(x).val()


@dataclass(frozen=True)
class NovikovPolynomial:
    """Laurent polynomial in ``n`` variables with Novikov coefficients."""

    n: int
    terms: tuple = ()  # ((exponent tuple, NovikovScalar), ...) sorted, nonzero

    @classmethod
    def of(cls, n, pairs):
        acc = {}
        for a, c in pairs:
            a = tuple(int(x) for x in a)
            if len(a) != n:
                raise InputError("exponent vector has the wrong length")
            acc[a] = acc.get(a, NovikovScalar()) + _scalar(c)
        return cls(n, tuple(sorted((a, c) for a, c in acc.items() if not c.is_zero())))

    @classmethod
    def constant(cls, n, c):
        return cls.of(n, [((0,) * n, c)])

    @classmethod
    def variable(cls, n, i):
        return cls.of(n, [(tuple(1 if j == i else 0 for j in range(n)), 1)])

    def is_zero(self):
        return not self.terms

    def support(self):
        return [a for a, _ in self.terms]

    def _lift(self, other):
        if isinstance(other, NovikovPolynomial):
            n = max(self.n, other.n)
            return self.widen(n), other.widen(n)
        return self, NovikovPolynomial.constant(self.n, _scalar(other))

    def widen(self, n):
        if n == self.n:
            return self
        return NovikovPolynomial.of(n, [(a + (0,) * (n - self.n), c) for a, c in self.terms])

    def __add__(self, other):
        a, b = self._lift(other)
        return NovikovPolynomial.of(a.n, a.terms + b.terms)

    __radd__ = __add__

    def __neg__(self):
        return NovikovPolynomial(self.n, tuple((a, -c) for a, c in self.terms))

    def __sub__(self, other):
        a, b = self._lift(other)
        return a + (-b)

    def __mul__(self, other):
        a, b = self._lift(other)
        return NovikovPolynomial.of(
            a.n, ((tuple(x + y for x, y in zip(e1, e2)), c1 * c2) for (e1, c1), (e2, c2) in itertools.product(a.terms, b.terms))
        )

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            if len(self.terms) != 1 or len(self.terms[0][1].terms) != 1:
                raise InputError("only monomials can be inverted")
            (a, c), = self.terms
            (lam, coef), = c.terms
            return NovikovPolynomial.of(self.n, [(tuple(-x * -k for x in a), NovikovScalar.q(-lam * -k, coef ** k))])
        out = NovikovPolynomial.constant(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def __str__(self):
        return format_polynomial(self)


def gauss_norm(F: NovikovPolynomial):
    """Valuation form of the Gauss norm: ``min_a val(f_a)``."""
    if F.is_zero():
        raise ZeroPolynomial("the zero polynomial has no Gauss norm")
    return min(c.val() for _, c in F.terms)


@dataclass(frozen=True)
class RationalPolytope:
    vertices: tuple

    def __post_init__(self):
        if not self.vertices:
            raise InputError("a polytope needs at least one point")
        object.__setattr__(self, "vertices", tuple(sd.hull_vertices(self.vertices)))


def polytope_valuation(F: NovikovPolynomial, P) -> Fraction:
    """``min over a in supp F and vertices p of P`` of ``val(f_a) + a . p``."""
    if F.is_zero():
        raise ZeroPolynomial("the zero polynomial has no valuation")
    verts = P.vertices if isinstance(P, RationalPolytope) else RationalPolytope(tuple(map(xn.as_vector, P))).vertices
    return min(c.val() + xn._dot(a, p) for a, c in F.terms for p in verts)


def trop_point(z) -> tuple:
    vals = []
    for i, x in enumerate(z):
        x = _scalar(x)
        if x.is_zero():
            raise ZeroCoordinate(f"coordinate {i} is zero")
        vals.append(x.val())
    return tuple(vals)


def tropical_value(F: NovikovPolynomial, X):
    """``min_a val(f_a) + a . X`` and the argmin exponents."""
    vals = [(c.val() + xn._dot(a, X), a) for a, c in F.terms]
    best = min(v for v, _ in vals)
    return best, tuple(a for v, a in vals if v == best)


@dataclass(frozen=True)
class BendPoint:
    point: Fraction
    weight: int

    def to_json(self):
        return {"point": xn.fmt_rational(self.point), "weight": self.weight}


def trop_hypersurface(F: NovikovPolynomial):
    """Corner locus of ``X -> min_a val(f_a) + a . X``.

    For two variables the result is a balanced CurveMap into the plane with
    one vertex per cell of the regular subdivision of the Newton polygon; for
    one variable it is a list of weighted bend points.
    """
    if F.is_zero():
        raise ZeroPolynomial("the zero polynomial has no tropicalization")
    pts = F.support()
    heights = [c.val() for _, c in F.terms]
    if F.n == 1:
        facets = sd.lower_facets(pts, heights)
        out = []
        for on, a, _ in sorted(facets, key=lambda f: -f[1][0]):
            xs = [pts[i][0] for i in on]
            out.append(BendPoint(-a[0], max(xs) - min(xs)))
        return sorted(out, key=lambda p: p.point)
    if F.n != 2:
        raise UnsupportedDimension("hypersurfaces are tropicalized for n <= 2")
    if len(pts) == 1:
        return CurveMap(MetricGraph((), ()), Plane(2), {}, ())
    if sd.affine_dim(pts) < 2:
        raise DegenerateSupport("the Newton polygon is not two-dimensional")
    facets = sd.lower_facets(pts, heights)
    duals = []
    edge_cells = defaultdict(list)
    for ci, (on, a, _) in enumerate(facets):
        duals.append(tuple(-x for x in a))
        cell = [pts[i] for i in on]
        for face in sd._hull_facets([xn.as_vector(p) for p in cell]):
            ends = sorted(cell[i] for i in face)
            edge_cells[(ends[0], ends[-1])].append(ci)
    edges, dirs = [], []
    for (p, q), cells in sorted(edge_cells.items()):
        w = gcd(*(int(y - x) for x, y in zip(p, q)))
        if len(cells) == 2:
            c1, c2 = cells
            u, t = xn.rational_content(xn.vec_sub(duals[c2], duals[c1]))
            edges.append(Edge(c1, c2, t / w, w, 1))
            dirs.append(u)
        else:
            (c1,) = cells
            normal = (-(q[1] - p[1]), q[0] - p[0])
            normal, _ = xn.primitive(normal)
            inside = next(r for r in (pts[i] for i in facets[c1][0]) if xn._dot(normal, xn.vec_sub(r, p)) != 0)
            if xn._dot(normal, xn.vec_sub(inside, p)) < 0:
                normal = tuple(-x for x in normal)
            edges.append(Edge(c1, None, None, w, 1))
            dirs.append(normal)
    graph = MetricGraph(tuple(range(len(facets))), tuple(edges))
    return CurveMap(graph, Plane(2), {i: d for i, d in enumerate(duals)}, tuple(dirs))


# ---------------------------------------------------------------- text format

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|(x\d+|[xyz])|(q)|(\^)|(\*)|(\+)|(-)|(\()|(\)))")
_ALIASES = {"x": 1, "y": 2, "z": 3}


def _tokenize(text):
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected input at position {pos}: {text[pos:pos + 10]!r}")
        kinds = ("num", "var", "q", "^", "*", "+", "-", "(", ")")
        for kind, group in zip(kinds, m.groups()):
            if group is not None:
                out.append((kind, group))
                break
        pos = m.end()
    return out


def _number(text):
    try:
        return Fraction(text)
    except ZeroDivisionError as exc:
        raise ParseError(f"zero denominator in {text!r}") from exc


class _Parser:
    def __init__(self, tokens, n):
        self.toks, self.i, self.n = tokens, 0, n

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def take(self, kind):
        if self.peek() != kind:
            raise ParseError(f"expected {kind!r}, found {self.peek()!r}")
        tok = self.toks[self.i]
        self.i += 1
        return tok[1]

    def expr(self):
        out = self.term()
        while self.peek() in ("+", "-"):
            op = self.take(self.peek())
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self):
        out = self.factor()
        while self.peek() == "*":
            self.take("*")
            out = out * self.factor()
        return out

    def signed_rational(self):
        if self.peek() == "(":
            self.take("(")
            value = self.signed_rational()
            self.take(")")
            return value
        sign = 1
        if self.peek() == "-":
            self.take("-")
            sign = -1
        return sign * _number(self.take("num"))

    def factor(self):
        if self.peek() == "-":
            self.take("-")
            return -self.factor()
        kind = self.peek()
        if kind == "num":
            base = NovikovPolynomial.constant(self.n, _number(self.take("num")))
        elif kind == "q":
            self.take("q")
            lam = Fraction(1)
            if self.peek() == "^":
                self.take("^")
                lam = self.signed_rational()
            return NovikovPolynomial.constant(self.n, NovikovScalar.q(lam))
        elif kind == "var":
            name = self.take("var")
            idx = _ALIASES.get(name) or int(name[1:])
            if idx < 1 or idx > self.n:
                raise ParseError(f"variable {name} outside x1..x{self.n}")
            base = NovikovPolynomial.variable(self.n, idx - 1)
        elif kind == "(":
            self.take("(")
            base = self.expr()
            self.take(")")
        else:
            raise ParseError(f"unexpected token {kind!r}")
        if self.peek() == "^":
            self.take("^")
            e = self.signed_rational()
            if e.denominator != 1:
                raise ParseError("variable exponents must be integers")
            base = base ** int(e)
        return base


def _variable_count(text):
    idx = [int(m) for m in re.findall(r"x(\d+)", text)]
    idx += [_ALIASES[m] for m in re.findall(r"(?<![\w])([xyz])(?![\w])", text)]
    return max(idx, default=0)


def parse_polynomial(text: str, n: int | None = None) -> NovikovPolynomial:
    """Parse ``"3/2*q^(1/2)*x1^2 + x2^(-1) - q"``; ``x, y, z`` alias ``x1, x2, x3``."""
    n = n if n is not None else max(_variable_count(text), 1)
    parser = _Parser(_tokenize(text), n)
    if parser.peek() is None:
        raise ParseError("empty expression")
    out = parser.expr()
    if parser.peek() is not None:
        raise ParseError(f"trailing input near token {parser.i}")
    return out


def parse_scalar(text: str) -> NovikovScalar:
    F = parse_polynomial(text, n=1)
    if any(any(a) for a in F.support()):
        raise ParseError("a scalar may not contain variables")
    return F.terms[0][1] if F.terms else NovikovScalar()


def _fmt_exp(e):
    return xn.fmt_rational(e) if e >= 0 and Fraction(e).denominator == 1 else f"({xn.fmt_rational(e)})"


def _fmt_term(lam, c):
    if lam == 0:
        return xn.fmt_rational(c)
    power = "q" if lam == 1 else f"q^{_fmt_exp(lam)}"
    return power if c == 1 else f"{xn.fmt_rational(c)}*{power}"


def format_scalar(x: NovikovScalar) -> str:
    if x.is_zero():
        return "0"
    return " + ".join(_fmt_term(lam, c) for lam, c in x.terms)


def format_polynomial(F: NovikovPolynomial) -> str:
    if F.is_zero():
        return "0"
    parts = []
    for a, c in F.terms:
        mono = [f"x{i + 1}" if e == 1 else f"x{i + 1}^{_fmt_exp(e)}" for i, e in enumerate(a) if e]
        coef = format_scalar(c)
        if len(c.terms) > 1 and (mono or len(F.terms) > 1):
            coef = f"({coef})"
        if mono and coef == "1":
            parts.append("*".join(mono))
        else:
            parts.append("*".join([coef] + mono))
    return " + ".join(parts)
