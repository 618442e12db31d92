"""Period matrices, Abel-Jacobi map and its constructive inverse."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .. import exactnum as xn
from ..errors import IndeterminateSign, InputError, NonCompact, NonzeroDegree, SingularMatrix, UnsupportedWeights
from .divisors import Divisor, GraphPoint, PLFunction, linear_equivalence
from .graph import MetricGraph


def spanning_tree(g: MetricGraph, tree=None) -> frozenset:
    """Edge indices of a spanning forest; greedy in edge order unless ``tree`` is given."""
    parent = {v: v for v in g.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    chosen = []
    order = list(tree) + [i for i in range(len(g.edges)) if i not in set(tree)] if tree is not None else range(len(g.edges))
    for i in order:
        e = g.edges[i]
        if e.is_ray:
            continue
        a, b = find(e.tail), find(e.head)
        if a == b:
            if tree is not None and i in tree:
                raise InputError(f"edge {i} closes a cycle in the requested tree")
            continue
        parent[a] = b
        chosen.append(i)
    return frozenset(chosen)


def _tree_paths(g: MetricGraph, tree: frozenset):
    """Signed edge vector (dict) of the tree path from the component root to every vertex."""
    adj = {v: [] for v in g.vertices}
    for i in tree:
        e = g.edges[i]
        adj[e.tail].append((i, e.head, 1))
        adj[e.head].append((i, e.tail, -1))
    paths = {}
    for comp in g.components():
        root = comp[0]
        paths[root] = {}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for i, y, s in adj[x]:
                if y not in paths:
                    p = dict(paths[x])
                    p[i] = p.get(i, 0) + s
                    paths[y] = p
                    queue.append(y)
    return paths


def fundamental_cycles(g: MetricGraph, tree=None):
    """Integer edge vectors of the fundamental cycles, one per non-tree compact edge.

    Each cycle is oriented so that its lowest-indexed edge is traversed forward.
    Returns ``(tree, non-tree edges, cycles)``.
    """
    t = spanning_tree(g, tree)
    paths = _tree_paths(g, t)
    m = len(g.edges)
    chords, cycles = [], []
    for i, e in enumerate(g.edges):
        if e.is_ray or i in t:
            continue
        vec = [0] * m
        vec[i] += 1
        for j, c in paths[e.tail].items():
            vec[j] += c
        for j, c in paths[e.head].items():
            vec[j] -= c
        lead = next(c for c in vec if c)
        if lead < 0:
            vec = [-c for c in vec]
        chords.append(i)
        cycles.append(tuple(vec))
    return t, tuple(chords), tuple(cycles)


def _require_compact(g: MetricGraph):
    if not g.is_compact():
        raise NonCompact("the graph has semi-infinite edges")


def period_matrix(g: MetricGraph, tree=None):
    """``Q_ij = sum_e eps_e len_e gamma_i(e) gamma_j(e)``; entries may be symbolic."""
    _require_compact(g)
    if not g.is_connected():
        raise InputError("period_matrix needs a connected graph")
    _, _, cycles = fundamental_cycles(g, tree)
    q = []
    for ci in cycles:
        row = []
        for cj in cycles:
            acc = Fraction(0)
            for e, a, b in zip(g.edges, ci, cj):
                if a and b:
                    acc = acc + e.length * (e.sign * a * b)
            row.append(acc)
        q.append(tuple(row))
    return tuple(q)


def inertia(Q):
    """``(positive, negative)`` eigenvalue counts of a symmetric matrix.

    Uses sign changes along the leading principal minors, each certified by
    interval refinement; a vanishing minor raises ``IndeterminateSign``.
    """
    signs = [xn.Sign.POSITIVE]
    for d in xn.leading_minors(Q):
        s = xn.sign_of(d)
        if s is xn.Sign.ZERO:
            raise IndeterminateSign("a leading minor vanishes")
        signs.append(s)
    neg = sum(1 for a, b in zip(signs, signs[1:]) if a is not b)
    return len(Q) - neg, neg


@dataclass(frozen=True)
class JacClass:
    """Point of ``R^g / Q Z^g`` stored by an arbitrary lift and its canonical representative."""

    period: tuple
    lift: tuple

    @property
    def genus(self):
        return len(self.lift)

    @property
    def canonical(self):
        if not self.lift:
            return ()
        return xn.reduce_mod_lattice(self.period, self.lift)

    def is_zero(self):
        if not self.lift:
            return True
        return xn.lattice_solve(self.period, self.lift) is not None

    def __eq__(self, other):
        if not isinstance(other, JacClass):
            return NotImplemented
        return self.period == other.period and JacClass(self.period, xn.vec_sub(self.lift, other.lift)).is_zero()

    def __hash__(self):
        return hash((self.period, self.canonical))

    def to_json(self):
        return {
            "period_matrix": [[xn.fmt_rational(c) for c in row] for row in self.period],
            "lift": [xn.fmt_rational(c) for c in self.lift],
            "canonical": [xn.fmt_rational(c) for c in self.canonical],
            "is_zero": self.is_zero(),
        }


class _AJData:
    """Precomputed cycles and tree potentials for repeated Abel-Jacobi evaluation."""

    def __init__(self, g: MetricGraph, tree=None, mixed=False):
        _require_compact(g)
        if not g.is_connected():
            raise InputError("the Abel-Jacobi map needs a connected graph")
        if not mixed and any(e.sign != 1 for e in g.edges):
            raise UnsupportedWeights("negative edges need mixed-sign mode")
        self.g = g
        self.tree, self.chords, self.cycles = fundamental_cycles(g, tree)
        self.paths = _tree_paths(g, self.tree)
        self.lengths = [g.length(i) for i in range(len(g.edges))]
        self.Q = tuple(tuple(xn.to_rational(c) for c in row) for row in period_matrix(g, tree))
        if self.cycles and xn.det(self.Q) == 0:
            raise SingularMatrix("the mixed-sign integration pairing is degenerate")
        self.vertex_pot = {v: self._path_integral(p) for v, p in self.paths.items()}

    def _path_integral(self, path):
        out = [Fraction(0)] * len(self.cycles)
        for i, c in path.items():
            w = self.g.edges[i].sign * self.lengths[i] * c
            for j, cyc in enumerate(self.cycles):
                if cyc[i]:
                    out[j] += w * cyc[i]
        return tuple(out)

    def potential(self, p: GraphPoint):
        if p.is_vertex:
            return self.vertex_pot[p.vertex]
        e = self.g.edges[p.edge]
        base = self.vertex_pot[e.tail]
        return tuple(b + p.offset * e.sign * cyc[p.edge] for b, cyc in zip(base, self.cycles))

    def of(self, D: Divisor):
        out = [Fraction(0)] * len(self.cycles)
        for p, m in D.terms:
            for j, x in enumerate(self.potential(p)):
                out[j] += m * x
        return JacClass(self.Q, tuple(out))


def abel_jacobi(g: MetricGraph, base, D: Divisor, tree=None, mixed=False) -> JacClass:
    """Abel-Jacobi class of a degree-0 divisor.

    ``base`` is accepted for symmetry with the pointed map; it cancels in degree 0.
    """
    if D.degree() != 0:
        raise NonzeroDegree(f"divisor has degree {D.degree()}")
    return _AJData(g, tree, mixed).of(D)


def jacobi_inversion(g: MetricGraph, base, target, tree=None) -> Divisor:
    """Degree-0 divisor supported at edge-interior points with Abel-Jacobi class ``target``.

    Coordinate ``i`` is realized by ``m`` stacked pairs of points placed
    symmetrically about the midpoint of the chord of cycle ``i``.
    """
    data = _AJData(g, tree)
    lift = target.lift if isinstance(target, JacClass) else tuple(xn.as_rational(c) for c in target)
    if len(lift) != len(data.cycles):
        raise InputError(f"target must have {len(data.cycles)} coordinates")
    if not lift:
        return Divisor()
    x = JacClass(data.Q, lift).canonical
    terms = []
    for i, chord in enumerate(data.chords):
        if x[i] == 0:
            continue
        length = data.lengths[chord]
        m = int(abs(x[i]) // length) + 1
        t = x[i] * data.cycles[i][chord] / (2 * m)
        mid = length / 2
        terms.append((GraphPoint.on_edge(chord, mid + t), m))
        terms.append((GraphPoint.on_edge(chord, mid - t), -m))
    return Divisor.of(g, terms)


def divide_class(g: MetricGraph, D: Divisor, k: int, tree=None) -> Divisor:
    """A divisor ``a`` with ``k a ~ D``, verified by linear equivalence."""
    if k <= 0:
        raise InputError("k must be a positive integer")
    lift = abel_jacobi(g, None, D, tree).lift
    a = jacobi_inversion(g, None, tuple(c / k for c in lift), tree)
    if not isinstance(linear_equivalence(g, k * a, D), PLFunction):
        raise AssertionError("divided class failed verification")
    return a
