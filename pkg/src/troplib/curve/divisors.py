"""Divisors, piecewise-linear functions and linear equivalence on metric graphs."""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .. import exactnum as xn
from ..errors import DegreeMismatch, InputError, NonCompact, NonIntegerSlope, UnsupportedWeights
from .graph import MetricGraph

# Largest integer model (number of nodes) the chip-firing route will build.
CHIP_FIRING_NODE_CAP = 400


@dataclass(frozen=True)
class GraphPoint:
    """A vertex, or a point at ``offset`` from the tail of a compact edge."""

    vertex: object = None
    edge: int | None = None
    offset: Fraction | None = None

    @staticmethod
    def at_vertex(v):
        return GraphPoint(vertex=v)

    @staticmethod
    def on_edge(edge, offset):
        return GraphPoint(edge=edge, offset=xn.as_rational(offset))

    @property
    def is_vertex(self):
        return self.edge is None

    def key(self):
        return (0, repr(self.vertex), 0, 0) if self.is_vertex else (1, "", self.edge, self.offset)

    def to_json(self):
        if self.is_vertex:
            return {"vertex": self.vertex}
        return {"edge": self.edge, "offset": xn.fmt_rational(self.offset)}

    @staticmethod
    def from_json(data):
        if "vertex" in data:
            return GraphPoint(vertex=data["vertex"])
        return GraphPoint.on_edge(int(data["edge"]), data["offset"])


def normalize_point(g: MetricGraph, p: GraphPoint) -> GraphPoint:
    if p.is_vertex:
        if p.vertex not in g.vertices:
            raise InputError(f"unknown vertex {p.vertex!r}")
        return p
    if not 0 <= p.edge < len(g.edges):
        raise InputError(f"unknown edge {p.edge}")
    e = g.edges[p.edge]
    if e.is_ray:
        raise NonCompact("points on semi-infinite edges are not supported")
    length = g.length(p.edge)
    if p.offset < 0 or p.offset > length:
        raise InputError(f"offset {p.offset} outside edge {p.edge}")
    if p.offset == 0:
        return GraphPoint(vertex=e.tail)
    if p.offset == length:
        return GraphPoint(vertex=e.head)
    return p


@dataclass(frozen=True)
class Divisor:
    """Finite integer combination of graph points, stored sorted without zeros."""

    terms: tuple = ()

    @classmethod
    def of(cls, g: MetricGraph, pairs):
        acc = defaultdict(int)
        for p, m in pairs:
            acc[normalize_point(g, p)] += int(m)
        return cls(tuple(sorted(((p, m) for p, m in acc.items() if m), key=lambda t: t[0].key())))

    @classmethod
    def point(cls, g, p, mult=1):
        return cls.of(g, [(p, mult)])

    def degree(self):
        return sum(m for _, m in self.terms)

    def support(self):
        return [p for p, _ in self.terms]

    def is_zero(self):
        return not self.terms

    def as_dict(self):
        return dict(self.terms)

    def _combine(self, other, s):
        acc = defaultdict(int, self.as_dict())
        for p, m in other.terms:
            acc[p] += s * m
        return Divisor(tuple(sorted(((p, m) for p, m in acc.items() if m), key=lambda t: t[0].key())))

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return Divisor(tuple((p, -m) for p, m in self.terms))

    def __rmul__(self, k):
        if k == 0:
            return Divisor()
        return Divisor(tuple((p, k * m) for p, m in self.terms))

    def to_json(self):
        return [{"point": p.to_json(), "mult": m} for p, m in self.terms]

    @classmethod
    def from_json(cls, g, data):
        return cls.of(g, [(GraphPoint.from_json(t["point"]), t["mult"]) for t in data])


@dataclass(frozen=True)
class EdgePiece:
    breakpoints: tuple  # strictly increasing interior offsets
    slopes: tuple  # len(breakpoints) + 1 integers


@dataclass(frozen=True)
class PLFunction:
    """Continuous piecewise-linear function with integer slopes.

    Slopes are measured along each edge from tail to head at unit speed.
    """

    vertex_values: dict
    pieces: tuple

    def validate(self, g: MetricGraph):
        if len(self.pieces) != len(g.edges):
            raise InputError("one piece record per edge required")
        for i, (e, pc) in enumerate(zip(g.edges, self.pieces)):
            if len(pc.slopes) != len(pc.breakpoints) + 1:
                raise InputError(f"edge {i}: slope count must be breakpoint count + 1")
            for s in pc.slopes:
                if Fraction(s).denominator != 1:
                    raise NonIntegerSlope(f"edge {i} has slope {s}")
            if e.is_ray:
                continue
            length = g.length(i)
            cuts = (Fraction(0),) + tuple(pc.breakpoints) + (length,)
            if any(a >= b for a, b in zip(cuts, cuts[1:])):
                raise InputError(f"edge {i}: breakpoints must be strictly increasing and interior")
            rise = sum(s * (b - a) for s, a, b in zip(pc.slopes, cuts, cuts[1:]))
            if self.vertex_values[e.tail] + rise != self.vertex_values[e.head]:
                raise InputError(f"edge {i}: values are discontinuous")
        return self

    def value(self, g: MetricGraph, p: GraphPoint):
        if p.is_vertex:
            return self.vertex_values[p.vertex]
        e = g.edges[p.edge]
        pc = self.pieces[p.edge]
        val = self.vertex_values[e.tail]
        prev = Fraction(0)
        for bp, s in zip(tuple(pc.breakpoints) + (p.offset,), pc.slopes):
            stop = min(bp, p.offset)
            val += s * (stop - prev)
            prev = stop
            if bp >= p.offset:
                break
        return val

    def to_json(self):
        return {
            "slope_convention": "outgoing",
            "vertex_values": [{"vertex": v, "value": xn.fmt_rational(x)} for v, x in self.vertex_values.items()],
            "edges": [
                {"breakpoints": [xn.fmt_rational(b) for b in pc.breakpoints], "slopes": [int(s) for s in pc.slopes]}
                for pc in self.pieces
            ],
        }

    @classmethod
    def from_json(cls, data):
        vv = data["vertex_values"]
        if isinstance(vv, dict):
            values = {k: xn.as_rational(x) for k, x in vv.items()}
        else:
            values = {t["vertex"]: xn.as_rational(t["value"]) for t in vv}
        pieces = tuple(
            EdgePiece(tuple(xn.as_rational(b) for b in pc.get("breakpoints", [])), tuple(xn.as_rational(s) for s in pc["slopes"]))
            for pc in data["edges"]
        )
        return cls(values, pieces)

    @classmethod
    def constant(cls, g: MetricGraph, c=0):
        return cls({v: Fraction(c) for v in g.vertices}, tuple(EdgePiece((), (0,)) for _ in g.edges))


def principal_divisor(g: MetricGraph, f: PLFunction) -> Divisor:
    """Sum of outgoing slopes at every vertex and breakpoint."""
    f.validate(g)
    acc = defaultdict(int)
    for i, (e, pc) in enumerate(zip(g.edges, f.pieces)):
        acc[GraphPoint(vertex=e.tail)] += int(pc.slopes[0])
        if e.head is not None:
            acc[GraphPoint(vertex=e.head)] -= int(pc.slopes[-1])
        for bp, left, right in zip(pc.breakpoints, pc.slopes, pc.slopes[1:]):
            acc[GraphPoint.on_edge(i, bp)] += int(right) - int(left)
    return Divisor.of(g, acc.items())


# ---------------------------------------------------------------- linear equivalence


@dataclass(frozen=True)
class NotEquivalent:
    """Negative answer; ``aj_lift`` is a lift of the nonzero Abel-Jacobi class of ``D1 - D2``."""

    aj_lift: tuple

    def to_json(self):
        return {"result": "NotEquivalent", "abel_jacobi_lift": [xn.fmt_rational(c) for c in self.aj_lift]}


def _check_plain(g: MetricGraph):
    if not g.is_compact():
        raise NonCompact("linear equivalence needs a compact graph")
    for i, e in enumerate(g.edges):
        if e.weight != 1 or e.sign != 1:
            raise UnsupportedWeights(f"edge {i} has weight {e.weight} and sign {e.sign}")
        if xn.is_symbolic(e.length):
            raise InputError("linear equivalence needs rational lengths")


def _subdivision(g: MetricGraph, extra: dict):
    """Segments of ``g`` cut at the interior points listed per edge in ``extra``.

    Returns ``(nodes, segments)`` with segments ``(edge, a, b, offset_a, offset_b)``.
    """
    nodes = [GraphPoint(vertex=v) for v in g.vertices]
    segments = []
    for i, e in enumerate(g.edges):
        length = g.length(i)
        cuts = sorted(extra.get(i, ()))
        inner = [GraphPoint.on_edge(i, t) for t in cuts]
        nodes.extend(inner)
        chain = [GraphPoint(vertex=e.tail)] + inner + [GraphPoint(vertex=e.head)]
        offs = [Fraction(0)] + cuts + [length]
        for a, b, oa, ob in zip(chain, chain[1:], offs, offs[1:]):
            segments.append((i, a, b, oa, ob))
    return nodes, segments


def _witness_from_potential(g, F, segments):
    """Assemble a PLFunction from node values and per-segment slopes."""
    slopes_by_edge = defaultdict(list)
    for i, a, b, oa, ob in segments:
        slopes_by_edge[i].append((oa, (F[b] - F[a]) / (ob - oa)))
    pieces = []
    for i in range(len(g.edges)):
        bps, slopes = [], []
        for off, s in slopes_by_edge[i]:
            if slopes and slopes[-1] == s:
                continue
            if slopes:
                bps.append(off)
            slopes.append(s)
        pieces.append(EdgePiece(tuple(bps), tuple(int(s) for s in slopes)))
    return PLFunction({v: F[GraphPoint(vertex=v)] for v in g.vertices}, tuple(pieces))


def _potential_solve(g, diff: Divisor):
    """Solve ``sum_{neighbours} (F(y) - F(x)) / len = diff(x)`` exactly; one node pinned per component."""
    extra = defaultdict(set)
    for p in diff.support():
        if not p.is_vertex:
            extra[p.edge].add(p.offset)
    nodes, segments = _subdivision(g, extra)
    index = {p: j for j, p in enumerate(nodes)}
    size = len(nodes)
    lap = [[Fraction(0)] * size for _ in range(size)]
    for _, a, b, oa, ob in segments:
        if a == b:
            continue
        w = 1 / (ob - oa)
        ia, ib = index[a], index[b]
        lap[ia][ia] -= w
        lap[ib][ib] -= w
        lap[ia][ib] += w
        lap[ib][ia] += w
    rhs = [Fraction(0)] * size
    for p, m in diff.terms:
        rhs[index[p]] += m
    pinned = set()
    for comp in g.components():
        members = {index[GraphPoint(vertex=v)] for v in comp}
        members |= {index[p] for p in nodes if not p.is_vertex and index[GraphPoint(vertex=g.edges[p.edge].tail)] in members}
        if sum(rhs[j] for j in members):
            return None
        pinned.add(min(members))
    free = [j for j in range(size) if j not in pinned]
    sub = [[lap[r][c] for c in free] for r in free]
    sol = xn.solve(sub, [rhs[r] for r in free]) if free else ()
    values = [Fraction(0)] * size
    for j, x in zip(free, sol):
        values[j] = x
    F = {p: values[index[p]] for p in nodes}
    for _, a, b, oa, ob in segments:
        if ((F[b] - F[a]) / (ob - oa)).denominator != 1:
            return None
    return _witness_from_potential(g, F, segments)


def _common_denominator(g: MetricGraph, diff: Divisor) -> int:
    dens = [g.length(i).denominator for i in range(len(g.edges))]
    dens += [p.offset.denominator for p in diff.support() if not p.is_vertex]
    return lcm(*dens) if dens else 1


def _model_size(g: MetricGraph, N: int) -> int:
    return len(g.vertices) + sum(int(g.length(i) * N) - 1 for i in range(len(g.edges)))


def _integer_model(g: MetricGraph, diff: Divisor):
    """Unit-length subdivision after scaling by the common denominator ``N``."""
    N = _common_denominator(g, diff)
    extra = {i: {Fraction(j, N) for j in range(1, int(g.length(i) * N))} for i in range(len(g.edges))}
    nodes, segments = _subdivision(g, extra)
    return N, nodes, segments


def _dhar_reduce(adj, chips, q):
    """Reduce ``chips`` to its ``q``-reduced form; returns ``(reduced, firing script)``."""
    nodes = list(adj)
    index = {x: i for i, x in enumerate(nodes)}
    nbrs = [[index[y] for y in adj[x]] for x in nodes]
    c = [chips[x] for x in nodes]
    fired = [0] * len(nodes)
    root = index[q]

    def fire(inside):
        for u, flag in enumerate(inside):
            if flag:
                fired[u] += 1
                for y in nbrs[u]:
                    if not inside[y]:
                        c[u] -= 1
                        c[y] += 1

    dist = [-1] * len(nodes)
    dist[root] = 0
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in nbrs[x]:
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                queue.append(y)
    for r in range(max(dist), 0, -1):
        inner = [0 <= d < r for d in dist]
        level = [x for x, d in enumerate(dist) if d == r]
        while any(c[x] < 0 for x in level):
            fire(inner)
    while True:
        burnt = [False] * len(nodes)
        burnt[root] = True
        heat = [0] * len(nodes)
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y in nbrs[x]:
                if burnt[y]:
                    continue
                heat[y] += 1
                if heat[y] > c[y]:
                    burnt[y] = True
                    queue.append(y)
        if all(burnt):
            return {x: c[i] for i, x in enumerate(nodes)}, {x: fired[i] for i, x in enumerate(nodes) if fired[i]}
        fire([not b for b in burnt])


def _chip_firing_solve(g, diff: Divisor):
    N, nodes, segments = _integer_model(g, diff)
    adj = {p: [] for p in nodes}
    for _, a, b, _, _ in segments:
        if a != b:
            adj[a].append(b)
            adj[b].append(a)
    chips = {p: 0 for p in nodes}
    for p, m in diff.terms:
        chips[p] += m
    total_script = defaultdict(int)
    for comp in g.components():
        members = set()
        stack = [GraphPoint(vertex=comp[0])]
        while stack:
            x = stack.pop()
            if x not in members:
                members.add(x)
                stack.extend(adj[x])
        sub_adj = {x: adj[x] for x in members}
        reduced, script = _dhar_reduce(sub_adj, {x: chips[x] for x in members}, GraphPoint(vertex=comp[0]))
        if any(reduced.values()):
            return None
        for x, c in script.items():
            total_script[x] += c
    # D - L(script) = 0 with the unit Laplacian, so f = -script / N has div f = D.
    F = {p: Fraction(-total_script[p], N) for p in nodes}
    return _witness_from_potential(g, F, segments)


def linear_equivalence(g: MetricGraph, D1: Divisor, D2: Divisor, method: str = "auto"):
    """Decide ``D1 ~ D2``; return a PLFunction ``f`` with ``div f = D1 - D2`` or NotEquivalent.

    ``method`` is ``"chip-firing"`` (Dhar burning on the integer model),
    ``"potential"`` (exact Laplacian solve) or ``"auto"``, which uses chip-firing
    when the integer model is small.  Every answer is cross-checked against the
    Abel-Jacobi criterion.
    """
    from .jacobian import abel_jacobi

    _check_plain(g)
    if D1.degree() != D2.degree():
        raise DegreeMismatch(f"degrees {D1.degree()} and {D2.degree()} differ")
    diff = D1 - D2
    if method == "auto":
        size = _model_size(g, _common_denominator(g, diff))
        method = "chip-firing" if size <= CHIP_FIRING_NODE_CAP else "potential"
    if method == "chip-firing":
        witness = _chip_firing_solve(g, diff)
    elif method == "potential":
        witness = _potential_solve(g, diff)
    else:
        raise InputError(f"unknown method {method!r}")
    aj = abel_jacobi(g, None, diff) if g.is_connected() else None
    if witness is None:
        if aj is not None and aj.is_zero():
            raise AssertionError("Abel-Jacobi class vanishes but no witness was found")
        return NotEquivalent(aj.lift if aj is not None else ())
    if principal_divisor(g, witness) != diff:
        raise AssertionError("witness does not reproduce D1 - D2")
    if aj is not None and not aj.is_zero():
        raise AssertionError("witness found for a nonzero Abel-Jacobi class")
    return witness

