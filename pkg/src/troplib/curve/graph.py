"""Metric graphs, targets and parametrized tropical curves."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

from .. import exactnum as xn
from ..errors import DimensionMismatch, InputError
from ..exactnum import SymbolicReal
from ..torus import TropicalTorus


@dataclass(frozen=True)
class Edge:
    """Oriented edge; ``head is None`` marks a semi-infinite edge (length ``None``)."""

    tail: object
    head: object
    length: object  # Fraction | SymbolicReal | None
    weight: int = 1
    sign: int = 1

    @property
    def is_ray(self):
        return self.head is None

    @property
    def is_loop(self):
        return self.head == self.tail

    def to_json(self):
        length = "inf" if self.length is None else _len_json(self.length)
        return {"tail": self.tail, "head": self.head, "length": length, "weight": self.weight, "sign": self.sign}


def _len_json(x):
    return x.to_json() if isinstance(x, SymbolicReal) else xn.fmt_rational(x)


@dataclass(frozen=True)
class MetricGraph:
    vertices: tuple
    edges: tuple
    symbols: xn.SymbolSet | None = None
    _incidence: dict = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        vs = tuple(self.vertices)
        if len(set(vs)) != len(vs):
            raise InputError("duplicate vertex ids")
        es = tuple(self.edges)
        vset = set(vs)
        for i, e in enumerate(es):
            if e.tail not in vset or (e.head is not None and e.head not in vset):
                raise InputError(f"edge {i} references an unknown vertex")
            if e.weight <= 0:
                raise InputError(f"edge {i} has non-positive weight")
            if e.sign not in (1, -1):
                raise InputError(f"edge {i} sign must be +1 or -1")
            if (e.length is None) != e.is_ray:
                raise InputError(f"edge {i}: infinite length exactly on semi-infinite edges")
            if e.length is not None and xn.sign_of(e.length) is not xn.Sign.POSITIVE:
                raise InputError(f"edge {i} has non-positive length")
        inc = defaultdict(list)
        for i, e in enumerate(es):
            inc[e.tail].append((i, 0))
            if e.head is not None:
                inc[e.head].append((i, 1))
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "edges", es)
        object.__setattr__(self, "_incidence", dict(inc))

    def ends_at(self, v):
        """Edge ends at ``v`` as ``(edge index, 0 for tail / 1 for head)``."""
        return self._incidence.get(v, [])

    def valency(self, v):
        return len(self.ends_at(v))

    def is_compact(self):
        return not any(e.is_ray for e in self.edges)

    def is_rational(self):
        return all(e.length is None or not xn.is_symbolic(e.length) for e in self.edges)

    def length(self, i) -> Fraction:
        return xn.to_rational(self.edges[i].length)

    def components(self):
        parent = {v: v for v in self.vertices}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for e in self.edges:
            if e.head is not None:
                parent[find(e.tail)] = find(e.head)
        groups = defaultdict(list)
        for v in self.vertices:
            groups[find(v)].append(v)
        return list(groups.values())

    def is_connected(self):
        return len(self.components()) <= 1

    def genus(self):
        compact = [e for e in self.edges if not e.is_ray]
        return len(compact) - len(self.vertices) + len(self.components())

    def to_json(self):
        out = {"vertices": list(self.vertices), "edges": [e.to_json() for e in self.edges]}
        if self.symbols is not None:
            out["symbols"] = self.symbols.to_json()
        return out

    @classmethod
    def from_json(cls, data):
        symbols = xn.SymbolSet.create(data["symbols"], data.get("independent", True)) if data.get("symbols") else None
        edges = []
        for e in data["edges"]:
            raw = e.get("length", "inf")
            length = None if raw in ("inf", None) else xn.sym_from_json(raw, symbols)
            edges.append(Edge(e["tail"], e.get("head"), length, int(e.get("weight", 1)), int(e.get("sign", 1))))
        return cls(tuple(data["vertices"]), tuple(edges), symbols)


# ---------------------------------------------------------------- targets


@dataclass(frozen=True)
class Plane:
    """Euclidean ``R^n`` with its standard integral structure."""

    n: int

    def to_json(self):
        return {"kind": "plane", "n": self.n}


@dataclass(frozen=True)
class Cylinder:
    """``R x B`` for a torus ``B``; coordinate 0 is the ``R`` factor."""

    torus: TropicalTorus

    @property
    def n(self):
        return self.torus.n + 1

    def to_json(self):
        return {"kind": "cylinder", "torus": self.torus.to_json()}


def target_dim(target):
    return target.n


def target_contains(target, v) -> bool:
    """Is ``v`` in the period lattice of the target?"""
    if isinstance(target, Plane):
        return all(c == 0 for c in v)
    if isinstance(target, Cylinder):
        return v[0] == 0 and target.torus.contains_lattice_vector(v[1:])
    return target.contains_lattice_vector(v)


def target_reduce(target, v):
    v = xn.as_vector(v)
    if isinstance(target, Plane):
        return v
    if isinstance(target, Cylinder):
        return (v[0],) + target.torus.reduce(v[1:])
    return target.reduce(v)


def target_to_json(target):
    if isinstance(target, TropicalTorus):
        return {"kind": "torus", "torus": target.to_json()}
    return target.to_json()


def target_from_json(data):
    kind = data["kind"]
    if kind == "plane":
        return Plane(int(data["n"]))
    if kind == "cylinder":
        return Cylinder(TropicalTorus.from_json(data["torus"]))
    if kind == "torus":
        return TropicalTorus.from_json(data.get("torus", data))
    raise InputError(f"unknown target kind {kind!r}")


# ---------------------------------------------------------------- curve maps


@dataclass(frozen=True)
class CurveMap:
    """A (mixed-sign) parametrized tropical curve ``h: C -> target``.

    ``images`` maps finite vertices to chart coordinates; ``directions`` holds a
    primitive integer vector per edge, oriented tail to head.  Edge
    compatibility: ``h(head) = h(tail) + length * weight * u`` modulo the
    target lattice.
    """

    graph: MetricGraph
    target: object
    images: dict
    directions: tuple

    def __post_init__(self):
        n = target_dim(self.target)
        imgs = {v: xn.as_vector(p) for v, p in dict(self.images).items()}
        for v in self.graph.vertices:
            if v not in imgs:
                raise InputError(f"vertex {v!r} has no image")
            if len(imgs[v]) != n:
                raise DimensionMismatch(f"image of {v!r} has the wrong dimension")
        dirs = tuple(tuple(int(c) for c in u) for u in self.directions)
        if len(dirs) != len(self.graph.edges):
            raise DimensionMismatch("one direction per edge required")
        for i, u in enumerate(dirs):
            if len(u) != n:
                raise DimensionMismatch(f"direction of edge {i} has the wrong dimension")
            if xn.content(u) != 1:
                raise InputError(f"direction of edge {i} is not primitive")
        object.__setattr__(self, "images", imgs)
        object.__setattr__(self, "directions", dirs)

    @property
    def dim(self):
        return target_dim(self.target)

    def edge_vector(self, i):
        e = self.graph.edges[i]
        return xn.vec_scale(xn.to_rational(e.length) * e.weight, self.directions[i])

    def incompatible_edges(self):
        bad = []
        for i, e in enumerate(self.graph.edges):
            if e.is_ray or xn.is_symbolic(e.length):
                continue
            gap = xn.vec_sub(xn.vec_add(self.images[e.tail], self.edge_vector(i)), self.images[e.head])
            if not target_contains(self.target, gap):
                bad.append(i)
        return bad

    def check_compatible(self):
        bad = self.incompatible_edges()
        if bad:
            raise InputError(f"edges {bad} are incompatible with the vertex images")
        return self

    def outgoing(self, v):
        """``(edge index, outward primitive direction, weight, sign)`` for each end at ``v``."""
        out = []
        for i, end in self.graph.ends_at(v):
            e = self.graph.edges[i]
            u = self.directions[i] if end == 0 else tuple(-c for c in self.directions[i])
            out.append((i, u, e.weight, e.sign))
        return out

    def point_image(self, edge, offset):
        e = self.graph.edges[edge]
        return xn.vec_add(self.images[e.tail], xn.vec_scale(offset * e.weight, self.directions[edge]))

    def lattice_shift(self, i):
        """Lattice vector ``h(tail) + length w u - h(head)`` of a compact edge."""
        e = self.graph.edges[i]
        return xn.vec_sub(xn.vec_add(self.images[e.tail], self.edge_vector(i)), self.images[e.head])

    def to_json(self):
        return {
            "graph": self.graph.to_json(),
            "target": target_to_json(self.target),
            "images": [[xn.fmt_rational(c) for c in self.images[v]] for v in self.graph.vertices],
            "directions": [list(u) for u in self.directions],
        }

    @classmethod
    def from_json(cls, data):
        graph = MetricGraph.from_json(data["graph"])
        target = target_from_json(data["target"])
        imgs = data["images"]
        if isinstance(imgs, dict):
            images = {v: imgs[str(v)] for v in graph.vertices}
        else:
            if len(imgs) != len(graph.vertices):
                raise DimensionMismatch("one image per vertex required")
            images = dict(zip(graph.vertices, imgs))
        return cls(graph, target, images, tuple(tuple(u) for u in data["directions"]))


@dataclass(frozen=True)
class BalanceReport:
    residuals: dict
    offenders: tuple

    @property
    def balanced(self):
        return not self.offenders

    def to_json(self):
        return {
            "balanced": self.balanced,
            "offenders": list(self.offenders),
            "residuals": [{"vertex": v, "residual": [str(c) for c in r]} for v, r in self.residuals.items()],
        }


def balancing_check(c: CurveMap) -> BalanceReport:
    """Signed balancing residual ``sum eps w u`` at every finite vertex."""
    residuals = {}
    offenders = []
    for v in c.graph.vertices:
        r = (0,) * c.dim
        for _, u, w, s in c.outgoing(v):
            r = tuple(a + s * w * b for a, b in zip(r, u))
        residuals[v] = r
        if any(r):
            offenders.append(v)
    return BalanceReport(residuals, tuple(offenders))
