"""Combinatorial surgery on parametrized curves: mixed vertices, effectivity, isogeny pullback."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .. import exactnum as xn
from ..errors import InputError, InputNotBalanced, UnbalancedInput
from ..torus import TropicalTorus
from .graph import CurveMap, Edge, MetricGraph, balancing_check


@dataclass
class _E:
    tail: object
    head: object
    length: object
    weight: int
    sign: int
    u: tuple


class _Work:
    """Mutable copy of a curve map used during surgery."""

    def __init__(self, c: CurveMap):
        self.target = c.target
        self.vertices = list(c.graph.vertices)
        self.images = dict(c.images)
        self.edges = [
            _E(e.tail, e.head, None if e.length is None else xn.to_rational(e.length), e.weight, e.sign, u)
            for e, u in zip(c.graph.edges, c.directions)
        ]
        self._taken = {str(v) for v in self.vertices}
        self._counter = 0

    def fresh(self, near):
        while True:
            self._counter += 1
            name = f"{near}.{self._counter}"
            if name not in self._taken:
                self._taken.add(name)
                return name

    def ends(self, v):
        """``(edge index, end, outward direction)`` at ``v``; a loop contributes two ends."""
        out = []
        for i, e in enumerate(self.edges):
            if e.tail == v:
                out.append((i, 0, e.u))
            if e.head == v:
                out.append((i, 1, tuple(-c for c in e.u)))
        return out

    def contribution(self, end):
        i, _, u = end
        e = self.edges[i]
        return tuple(e.sign * e.weight * c for c in u)

    def move_end(self, end, new_vertex, extra=0):
        i, which, _ = end
        e = self.edges[i]
        if which == 0:
            e.tail = new_vertex
        else:
            e.head = new_vertex
        if extra and e.length is not None:
            e.length += extra

    def build(self):
        graph = MetricGraph(
            tuple(self.vertices),
            tuple(Edge(e.tail, e.head, e.length, e.weight, e.sign) for e in self.edges),
        )
        return CurveMap(graph, self.target, self.images, tuple(e.u for e in self.edges))


def _fix_mixed_trivalent(w: _Work, v, ends, length):
    signs = [w.edges[i].sign for i, _, _ in ends]
    minority = next(k for k in range(3) if signs.count(signs[k]) == 1)
    i3, _, u3 = ends[minority]
    e3 = w.edges[i3]
    majority_sign = -e3.sign
    x = w.fresh(v)
    w.vertices.append(x)
    w.images[x] = xn.vec_sub(w.images[v], xn.vec_scale(length * e3.weight, u3))
    w.move_end(ends[minority], x, extra=length)
    w.edges.append(_E(v, x, length, e3.weight, majority_sign, tuple(-c for c in u3)))


def _split_high_valency(w: _Work, v, ends, length):
    contrib = [w.contribution(end) for end in ends]
    pairs = list(itertools.combinations(range(len(ends)), 2))
    pairs.sort(key=lambda p: w.edges[ends[p[0]][0]].sign != w.edges[ends[p[1]][0]].sign)
    a, b = next(p for p in pairs if any(x + y for x, y in zip(contrib[p[0]], contrib[p[1]])))
    resid = tuple(x + y for x, y in zip(contrib[a], contrib[b]))
    p, r = xn.primitive(resid)
    sa, sb = w.edges[ends[a][0]].sign, w.edges[ends[b][0]].sign
    sigma = sa if sa == sb else 1
    v2, mid = w.fresh(v), w.fresh(v)
    w.vertices.extend([v2, mid])
    w.images[v2] = w.images[v]
    w.images[mid] = xn.vec_sub(w.images[v], xn.vec_scale(sigma * length * r, p))
    for end in (ends[a], ends[b]):
        w.move_end(end, v2)
    away = tuple(-sigma * c for c in p)
    w.edges.append(_E(v2, mid, length, r, sigma, away))
    w.edges.append(_E(mid, v, length, r, -sigma, tuple(-c for c in away)))


def _merge_same_sign_bivalent(w: _Work, v, ends):
    first, second = ends
    if first[0] == second[0]:
        return False
    if w.edges[first[0]].head is None:
        first, second = second, first
    (i, wi, _), (j, wj, uj) = first, second
    ei, ej = w.edges[i], w.edges[j]
    if ei.head is None:
        return False
    # walk from the far end of ei through v and on along ej
    start = ei.head if wi == 0 else ei.tail
    far = None if ej.head is None else (ej.head if wj == 0 else ej.tail)
    length = None if ej.length is None else ei.length + ej.length
    merged = _E(start, far, length, ei.weight, ei.sign, uj)
    for k in sorted((i, j), reverse=True):
        del w.edges[k]
    w.edges.append(merged)
    w.vertices.remove(v)
    del w.images[v]
    return True


def normalize_mixed_vertices(c: CurveMap, length=1) -> CurveMap:
    """Rewrite an eps-balanced curve so every vertex is uniform trivalent or opposite-sign bivalent.

    Mixed trivalent vertices move their minority edge to a new bivalent
    vertex at distance ``length``; vertices of valency four or more split off
    a pair of edges through a folded compact edge; same-sign bivalent
    vertices are smoothed away.  The map is unchanged outside a compact set.
    """
    length = xn.as_rational(length)
    if length <= 0:
        raise InputError("inserted length must be positive")
    report = balancing_check(c)
    if not report.balanced:
        raise UnbalancedInput(f"vertices {list(report.offenders)} are not balanced")
    w = _Work(c)
    changed = True
    while changed:
        changed = False
        for v in list(w.vertices):
            ends = w.ends(v)
            signs = {w.edges[i].sign for i, _, _ in ends}
            if len(ends) >= 4:
                _split_high_valency(w, v, ends, length)
            elif len(ends) == 3 and len(signs) == 2:
                _fix_mixed_trivalent(w, v, ends, length)
            elif len(ends) == 2 and len(signs) == 1 and _merge_same_sign_bivalent(w, v, ends):
                pass
            else:
                continue
            changed = True
            break
    out = w.build()
    if not balancing_check(out).balanced:
        raise AssertionError("surgery broke the balancing condition")
    return out


def effective_balance_check(directions, weights) -> bool:
    """Is a signed-balanced vertex also balanced once every weight is made positive?"""
    dirs = [tuple(int(c) for c in u) for u in directions]
    ws = [int(x) for x in weights]
    if len(dirs) != len(ws) or not dirs:
        raise InputError("one weight per direction required")
    n = len(dirs[0])
    signed = [sum(wt * u[k] for u, wt in zip(dirs, ws)) for k in range(n)]
    if any(signed):
        raise InputNotBalanced(f"signed sum {signed} is not zero")
    return not any(sum(abs(wt) * u[k] for u, wt in zip(dirs, ws)) for k in range(n))


def pullback_curve(c: CurveMap, k: int) -> CurveMap:
    """Preimage of ``c`` under multiplication by ``k`` on its torus target."""
    if not isinstance(c.target, TropicalTorus):
        raise InputError("pullback needs a torus target")
    if k <= 0:
        raise InputError("k must be a positive integer")
    if k == 1:
        return c
    torus = c.target
    M = torus.rational_M()
    n = torus.n
    copies = list(itertools.product(range(k), repeat=n))

    def name(v, j):
        return f"{v}@{','.join(map(str, j))}"

    vertices, images, edges, dirs = [], {}, [], []
    for v in c.graph.vertices:
        for j in copies:
            vertices.append(name(v, j))
            images[name(v, j)] = xn.vec_scale(Fraction(1, k), xn.vec_add(c.images[v], xn.matvec(M, j)))
    for i, e in enumerate(c.graph.edges):
        shift = None
        if not e.is_ray:
            shift = xn.lattice_solve(M, c.lattice_shift(i))
            if shift is None:
                raise InputError(f"edge {i} is incompatible with the vertex images")
        for j in copies:
            if e.is_ray:
                edges.append(Edge(name(e.tail, j), None, None, e.weight, e.sign))
            else:
                head = tuple((a + b) % k for a, b in zip(j, shift))
                edges.append(Edge(name(e.tail, j), name(e.head, head), xn.to_rational(e.length) / k, e.weight, e.sign))
            dirs.append(c.directions[i])
    return CurveMap(MetricGraph(tuple(vertices), tuple(edges)), torus, images, tuple(dirs)).check_compatible()
