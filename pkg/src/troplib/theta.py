"""Tropical theta functions, their periodic regular subdivisions and theta curves."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt

from . import exactnum as xn
from . import subdivision as sd
from .curve.graph import CurveMap, Edge, MetricGraph
from .curve.surgery import pullback_curve
from .errors import InputError, NotRegular, SearchExhausted, UnsupportedDimension, WindowTooSmall
from .torus import Polarization, TorusPoint

GENERATOR = "python-random-mt19937/v1"
MAX_WINDOW_RADIUS = 4


@dataclass(frozen=True)
class ThetaData:
    """Polarization, level ``k`` and a height perturbation ``delta`` on cosets of ``k A^T Z^n``."""

    polarization: Polarization
    k: int = 1
    delta: tuple = ()
    _cache: dict = field(default_factory=dict, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.k <= 0:
            raise InputError("k must be a positive integer")
        if not self.polarization.torus.is_rational:
            raise InputError("theta functions need a rational torus")
        items = dict(self.delta.items() if isinstance(self.delta, dict) else self.delta)
        clean = {}
        for rep, val in items.items():
            rep = self.coset_rep(rep)
            val = xn.as_rational(val)
            if val:
                clean[rep] = clean.get(rep, 0) + val
        object.__setattr__(self, "delta", tuple(sorted(clean.items())))

    @property
    def n(self):
        return self.polarization.torus.n

    @property
    def M(self):
        return self.polarization.torus.rational_M()

    @property
    def translations(self):
        """Basis (columns) of the translation lattice ``k A^T Z^n`` acting on covectors."""
        if "lat" not in self._cache:
            self._cache["lat"] = xn.mat_scale(self.k, xn.transpose(self.polarization.A))
        return self._cache["lat"]

    @property
    def hnf_basis(self):
        if "hnf" not in self._cache:
            self._cache["hnf"] = xn.hnf(self.translations)
        return self._cache["hnf"]

    @property
    def covector_gram(self):
        if "gram" not in self._cache:
            self._cache["gram"] = self.polarization.covector_gram()
        return self._cache["gram"]

    @property
    def vector_gram(self):
        if "vgram" not in self._cache:
            self._cache["vgram"] = self.polarization.vector_gram()
        return self._cache["vgram"]

    def coset_rep(self, alpha):
        """Canonical representative of ``alpha`` modulo ``k A^T Z^n`` (box of the HNF diagonal)."""
        H = self.hnf_basis
        x = [int(c) for c in alpha]
        for i in range(len(x)):
            q = x[i] // int(H[i][i])
            if q:
                x = [a - q * int(H[r][i]) for r, a in enumerate(x)]
        return tuple(x)

    def coset_reps(self):
        H = self.hnf_basis
        return [tuple(c) for c in itertools.product(*(range(int(H[i][i])) for i in range(self.n)))]

    def delta_of(self, alpha):
        return dict(self.delta).get(self.coset_rep(alpha), Fraction(0))

    def norm_sq(self, alpha):
        return xn._dot(alpha, xn.matvec(self.covector_gram, alpha))

    def height(self, alpha):
        """Legendre height ``|alpha^#|^2 / 2k - delta(alpha)``."""
        key = ("h", alpha)
        if key not in self._cache:
            self._cache[key] = self.norm_sq(alpha) / (2 * self.k) - self.delta_of(alpha)
        return self._cache[key]

    def oscillation(self):
        vals = [v for _, v in self.delta] + [Fraction(0)]
        return max(vals) - min(vals)

    def translation_of(self, gamma):
        return xn.matvec(self.translations, gamma)

    def to_json(self):
        return {
            "polarization": self.polarization.to_json(),
            "k": self.k,
            "delta": [{"coset": list(rep), "value": xn.fmt_rational(v)} for rep, v in self.delta],
        }

    @classmethod
    def from_json(cls, data):
        pol = Polarization.from_json(data["polarization"])
        delta = {tuple(d["coset"]): d["value"] for d in data.get("delta", [])}
        return cls(pol, int(data.get("k", 1)), delta)


def _candidates(td: ThetaData, v):
    """Covectors that can attain the maximum at ``v``.

    Without ``delta`` the maximum sits at the lattice point nearest (in the
    covector metric) to ``alpha* = k G v``; any maximizer is no farther from
    ``alpha*`` than the rounded point plus ``2k`` times the oscillation of ``delta``.
    """
    G, P = td.vector_gram, td.covector_gram
    star = xn.vec_scale(td.k, xn.matvec(G, v))
    near = tuple(round(c) for c in star)
    gap = xn.vec_sub(near, star)
    r2 = xn._dot(gap, xn.matvec(P, gap)) + 2 * td.k * td.oscillation()
    ranges = []
    for i in range(td.n):
        b = r2 * G[i][i]
        w = isqrt(b.numerator // b.denominator) + 1
        ranges.append(range(math.ceil(star[i] - w), math.floor(star[i] + w) + 1))
    for alpha in itertools.product(*ranges):
        d = xn.vec_sub(alpha, star)
        if xn._dot(d, xn.matvec(P, d)) <= r2:
            yield alpha


def theta_eval(td: ThetaData, v):
    """Value of ``f_{k,delta}(v)`` and the sorted argmax set."""
    v = xn.as_vector(v)
    if len(v) != td.n:
        raise InputError("point has the wrong dimension")
    best, arg = None, []
    for alpha in _candidates(td, v):
        val = xn._dot(alpha, v) - td.height(alpha)
        if best is None or val > best:
            best, arg = val, [alpha]
        elif val == best:
            arg.append(alpha)
    return best, tuple(sorted(arg))


def quasi_periodicity_defect(td: ThetaData, v, gamma):
    """``f(v + M gamma) - f(v) - k c(gamma)(v) - k gamma^T (A M) gamma / 2``; identically zero."""
    v = xn.as_vector(v)
    gamma = tuple(int(c) for c in gamma)
    shifted = xn.vec_add(v, xn.matvec(td.M, gamma))
    c = td.polarization.c(gamma)
    quad = xn._dot(gamma, xn.matvec(td.polarization.metric, gamma))
    return theta_eval(td, shifted)[0] - theta_eval(td, v)[0] - td.k * xn._dot(c, v) - td.k * quad / 2


# ---------------------------------------------------------------- subdivisions


@dataclass(frozen=True)
class Cell:
    """Lower-hull facet: every lattice point on its supporting plane, and the dual point."""

    points: tuple
    dual: tuple

    @property
    def vertices(self):
        return tuple(sd.hull_vertices(self.points))

    def to_json(self):
        return {"points": [list(p) for p in self.points], "dual_vertex": [xn.fmt_rational(c) for c in self.dual]}


@dataclass(frozen=True)
class PeriodicSubdivision:
    """Cells up to translation by ``k A^T Z^n``, each in a canonical position."""

    theta: ThetaData
    cells: tuple

    def translate(self, cell: Cell, gamma) -> Cell:
        lam = self.theta.translation_of(gamma)
        shift = xn.matvec(self.theta.M, gamma)
        return Cell(tuple(sorted(xn.vec_add(p, lam) for p in cell.points)), xn.vec_add(cell.dual, shift))

    def to_json(self):
        return {"theta": self.theta.to_json(), "cells": [c.to_json() for c in self.cells]}


def _canonical_cell(td: ThetaData, points):
    """Translate ``points`` so that their least point is a coset representative."""
    anchor = min(tuple(int(c) for c in p) for p in points)
    lam = xn.vec_sub(td.coset_rep(anchor), anchor)
    return tuple(sorted(tuple(int(c) for c in xn.vec_add(q, lam)) for q in points)), lam


def _gamma_of(td: ThetaData, lam):
    gamma = xn.lattice_solve(td.translations, lam)
    if gamma is None:
        raise AssertionError("translation outside k A^T Z^n")
    return gamma


def _cells_at(td: ThetaData, alpha0, radius):
    n = td.n
    window = [
        tuple(a + d for a, d in zip(alpha0, off))
        for off in itertools.product(range(-radius, radius + 1), repeat=n)
        if any(off)
    ]
    found = {}
    tried = set()
    for combo in itertools.combinations(window, n):
        pts = (alpha0,) + combo
        plane = sd.plane_through(pts, [td.height(p) for p in pts])
        if plane is None:
            continue
        a, b = plane
        if (a, b) in tried:
            continue
        tried.add((a, b))
        if any(td.height(q) < xn._dot(a, q) + b for q in window):
            continue
        val, arg = theta_eval(td, a)
        if val != -b:
            continue
        found[arg] = a
    return found


def regular_subdivision(td: ThetaData, max_radius: int = MAX_WINDOW_RADIUS) -> PeriodicSubdivision:
    """Lower-hull cells of the heights ``|alpha^#|^2/2k - delta(alpha)`` modulo translations.

    Every facet is certified by evaluating the theta function at its dual
    point.  Completeness is certified by the cell volumes of one orbit
    representative each summing to the covolume of ``k A^T Z^n``.
    """
    if td.n > 3:
        raise UnsupportedDimension("subdivisions are supported for n <= 3")
    covolume = abs(xn.det(td.translations))
    for radius in range(1, max_radius + 1):
        cells = {}
        for rep in td.coset_reps():
            for pts, a in _cells_at(td, rep, radius).items():
                canon, lam = _canonical_cell(td, pts)
                if canon in cells:
                    continue
                gamma = _gamma_of(td, lam)
                cells[canon] = Cell(canon, xn.vec_add(a, xn.matvec(td.M, gamma)))
        total = sum((sd.volume(c.points) for c in cells.values()), Fraction(0))
        if total == covolume:
            return PeriodicSubdivision(td, tuple(cells[k] for k in sorted(cells)))
        if total > covolume:
            raise AssertionError("cells overlap; subdivision engine inconsistency")
    raise WindowTooSmall(f"cells not complete within window radius {max_radius}")


@dataclass(frozen=True)
class RegularityReport:
    regular: bool
    offender: Cell | None = None
    reason: str = ""

    def __bool__(self):
        return self.regular

    def to_json(self):
        out = {"regular": self.regular}
        if self.offender is not None:
            out["offender"] = self.offender.to_json()
            out["reason"] = self.reason
        return out


def regularity_check(sub: PeriodicSubdivision) -> RegularityReport:
    """Every cell must be a lattice simplex whose only lattice points are its vertices."""
    n = sub.theta.n
    for cell in sub.cells:
        if len(cell.points) != n + 1 or sd.affine_dim(cell.points) != n:
            return RegularityReport(False, cell, "not a simplex")
        if len(sd.lattice_points_in_simplex(cell.points)) != n + 1:
            return RegularityReport(False, cell, "contains extra lattice points")
    return RegularityReport(True)


def cells_embed(sub: PeriodicSubdivision) -> bool:
    """No two points of a closed cell differ by a nonzero translation."""
    td = sub.theta
    for cell in sub.cells:
        for p, q in itertools.combinations(cell.points, 2):
            if xn.lattice_solve(td.translations, xn.vec_sub(p, q)) is not None:
                return False
    return True


@dataclass(frozen=True)
class ThetaSearchResult:
    theta: ThetaData
    subdivision: PeriodicSubdivision
    seed: int
    attempts: int
    generator: str = GENERATOR

    def to_json(self):
        return {
            "theta": self.theta.to_json(),
            "subdivision": self.subdivision.to_json(),
            "seed": self.seed,
            "generator": self.generator,
            "attempts": self.attempts,
        }


def find_regular_theta(pol: Polarization, seed: int, max_k: int = 6, magnitudes: int = 4, tries: int = 8):
    """Search for ``(k, delta)`` whose theta divisor is regular.

    ``k`` grows from 1 until every cell of the unperturbed subdivision embeds
    in the quotient (skipped in dimension 1, where cells are points' duals);
    then ``delta`` is drawn on coset representatives from a seeded generator
    at magnitudes ``1/10, 1/100, ...``.
    """
    if pol.torus.n > 2:
        raise UnsupportedDimension("the regular theta search supports n <= 2")
    rng = random.Random(seed)
    attempts = 0
    for k in range(1, max_k + 1):
        td = ThetaData(pol, k)
        sub = regular_subdivision(td)
        attempts += 1
        if pol.torus.n > 1 and not cells_embed(sub):
            continue
        if regularity_check(sub):
            return ThetaSearchResult(td, sub, seed, attempts)
        for j in range(1, magnitudes + 1):
            scale = Fraction(1, 10 ** j)
            for _ in range(tries):
                delta = {rep: scale * Fraction(rng.randrange(1, 1000), 1000) for rep in td.coset_reps()}
                cand = ThetaData(pol, k, delta)
                sub = regular_subdivision(cand)
                attempts += 1
                if (pol.torus.n == 1 or cells_embed(sub)) and regularity_check(sub):
                    return ThetaSearchResult(cand, sub, seed, attempts)
    raise SearchExhausted(f"no regular theta divisor found with k <= {max_k}")


# ---------------------------------------------------------------- theta curves


def theta_curve_2d(td: ThetaData, sub: PeriodicSubdivision | None = None) -> CurveMap:
    """Bend locus of a regular theta function on a 2-torus as a trivalent curve map.

    Vertex ``i`` is dual to ``sub.cells[i]``; edges are dual to the cell edges
    modulo translation, with weight the lattice length of the dual edge.
    """
    if td.n != 2:
        raise UnsupportedDimension("theta curves are extracted for n = 2 only")
    sub = sub if sub is not None else regular_subdivision(td)
    report = regularity_check(sub)
    if not report:
        raise NotRegular(report.reason)
    cells = sub.cells
    index = {c.points: i for i, c in enumerate(cells)}
    seen = set()
    edges, dirs = [], []
    for i, cell in enumerate(cells):
        for p, q in itertools.combinations(cell.points, 2):
            canon, _ = _canonical_cell(td, (p, q))
            if canon in seen:
                continue
            seen.add(canon)
            j, gamma = _neighbour(td, sub, cell, p, q)
            other_dual = xn.vec_add(cells[j].dual, xn.matvec(td.M, gamma))
            disp = xn.vec_sub(other_dual, cell.dual)
            u, t = xn.rational_content(disp)
            w = gcd(*(int(c) for c in xn.vec_sub(q, p)))
            edges.append(Edge(i, j, t / w, w, 1))
            dirs.append(u)
    images = {i: c.dual for i, c in enumerate(cells)}
    graph = MetricGraph(tuple(range(len(cells))), tuple(edges))
    return CurveMap(graph, td.polarization.torus, images, tuple(dirs)).check_compatible()


def _neighbour(td: ThetaData, sub: PeriodicSubdivision, cell: Cell, p, q):
    """The other cell containing the edge ``pq``, as (index, gamma) with translate ``cells[index] + k A^T gamma``."""
    hits = []
    for j, other in enumerate(sub.cells):
        for r in other.points:
            lam = xn.vec_sub(p, r)
            gamma = xn.lattice_solve(td.translations, lam)
            if gamma is None:
                continue
            moved = {tuple(int(c) for c in xn.vec_add(s, lam)) for s in other.points}
            if tuple(int(c) for c in q) in moved and moved != set(cell.points):
                hits.append((j, gamma))
    if len(hits) != 1:
        raise AssertionError(f"edge has {len(hits)} neighbouring cells")
    return hits[0]


# ---------------------------------------------------------------- two-point translation


@dataclass(frozen=True)
class MarkedCurve:
    """A translated (possibly densified) curve with two marked edge-interior points."""

    curve: CurveMap
    tau: tuple
    k: int
    marks: tuple  # ((edge, offset), (edge, offset)) for b0 and b

    def to_json(self):
        return {
            "curve": self.curve.to_json(),
            "tau": [xn.fmt_rational(c) for c in self.tau],
            "k": self.k,
            "marks": [{"edge": e, "offset": xn.fmt_rational(o)} for e, o in self.marks],
        }


def translate_curve(c: CurveMap, tau) -> CurveMap:
    images = {v: xn.vec_add(p, tau) for v, p in c.images.items()}
    return CurveMap(c.graph, c.target, images, c.directions)


def _pair_solutions(c: CurveMap, b0, b):
    """Translations placing ``b0`` and ``b`` interior to edges, tried in a fixed order."""
    M = c.target.rational_M()
    Minv = xn.inverse(M)
    segs = []
    for i, e in enumerate(c.graph.edges):
        if e.is_ray:
            continue
        segs.append((i, c.images[e.tail], c.edge_vector(i), xn.to_rational(e.length)))
    for (i1, p1, d1, L1), (i2, p2, d2, L2) in itertools.product(segs, repeat=2):
        base = xn.vec_add(xn.vec_sub(xn.vec_sub(b0, b), p1), p2)
        bound = [
            int(sum(abs(Minv[r][j]) * (abs(d1[j]) + abs(d2[j]) + abs(base[j])) for j in range(2))) + 1 for r in range(2)
        ]
        ms = sorted(itertools.product(range(-bound[0], bound[0] + 1), range(-bound[1], bound[1] + 1)), key=lambda m: (abs(m[0]) + abs(m[1]), m))
        for m in ms:
            rhs = xn.vec_add(base, xn.matvec(M, m))
            for s, t in _solve_segment_pair(d1, d2, rhs):
                tau = xn.vec_sub(xn.vec_sub(b0, p1), xn.vec_scale(s, d1))
                yield tau, ((i1, s * L1), (i2, t * L2))


def _solve_segment_pair(d1, d2, rhs):
    """``(s, t)`` in the open unit square with ``s d1 - t d2 = rhs``."""
    det = d1[0] * (-d2[1]) - (-d2[0]) * d1[1]
    if det != 0:
        s = (rhs[0] * (-d2[1]) - (-d2[0]) * rhs[1]) / det
        t = (d1[0] * rhs[1] - d1[1] * rhs[0]) / det
        if 0 < s < 1 and 0 < t < 1:
            yield s, t
        return
    # parallel: rhs must lie along d1; then s = sigma + rho t
    if d1[0] * rhs[1] - d1[1] * rhs[0] != 0:
        return
    j = 0 if d1[0] != 0 else 1
    sigma = rhs[j] / d1[j]
    rho = d2[j] / d1[j]
    lo, hi = Fraction(0), Fraction(1)
    # 0 < sigma + rho t < 1
    if rho > 0:
        lo, hi = max(lo, -sigma / rho), min(hi, (1 - sigma) / rho)
    else:
        lo, hi = max(lo, (1 - sigma) / rho), min(hi, -sigma / rho)
    if lo < hi:
        t = (lo + hi) / 2
        yield sigma + rho * t, t


def _on_edges(c: CurveMap, x):
    """Edge-interior positions ``(edge, offset)`` of the torus point ``x`` on ``c``."""
    M = c.target.rational_M()
    Minv = xn.inverse(M)
    out = []
    for i, e in enumerate(c.graph.edges):
        if e.is_ray:
            continue
        d = c.edge_vector(i)
        gap = xn.vec_sub(x, c.images[e.tail])
        bound = [int(sum(abs(Minv[r][j]) * (abs(d[j]) + abs(gap[j])) for j in range(2))) + 1 for r in range(2)]
        for m in itertools.product(range(-bound[0], bound[0] + 1), range(-bound[1], bound[1] + 1)):
            g = xn.vec_add(gap, xn.matvec(M, m))
            if d[0] * g[1] - d[1] * g[0] != 0:
                continue
            j = 0 if d[0] != 0 else 1
            s = g[j] / d[j]
            if 0 < s < 1:
                out.append((i, s * xn.to_rational(e.length)))
    return sorted(out)


def through_two_points(c: CurveMap, b0, b, max_k: int = 6) -> MarkedCurve:
    """Translate ``c`` (densifying by isogeny pullback if needed) so ``b0`` and ``b`` lie on open edges."""
    if c.dim != 2:
        raise UnsupportedDimension("two-point search runs on 2-tori")
    b0 = b0.coords if isinstance(b0, TorusPoint) else xn.as_vector(b0)
    b = b.coords if isinstance(b, TorusPoint) else xn.as_vector(b)
    for k in range(1, max_k + 1):
        cur = c if k == 1 else pullback_curve(c, k)
        on0, on1 = _on_edges(cur, b0), _on_edges(cur, b)
        if on0 and on1 and (on0[0] != on1[0]):
            return MarkedCurve(cur, (Fraction(0), Fraction(0)), k, (on0[0], on1[0]))
        for tau, marks in _pair_solutions(cur, b0, b):
            if marks[0] != marks[1]:
                return MarkedCurve(translate_curve(cur, tau), tau, k, marks)
    raise SearchExhausted(f"no translation found up to densification k = {max_k}")
