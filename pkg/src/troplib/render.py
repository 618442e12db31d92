"""Deterministic SVG for planar curves, curves in 2-tori and cylinders, and periodic subdivisions."""

from __future__ import annotations

import itertools
from fractions import Fraction

from . import exactnum as xn
from . import subdivision as sd
from .curve.graph import CurveMap, Cylinder, Plane
from .errors import InputError, UnsupportedDimension
from .theta import PeriodicSubdivision
from .torus import TropicalTorus

PRECISION = 12
SCALE = 100
_TRANSLATE_RADIUS = 3


def fmt(x) -> str:
    """Fixed 12-digit decimal, rounded half away from zero, computed exactly."""
    x = Fraction(x)
    scaled = abs(x) * 10**PRECISION
    q, r = divmod(scaled.numerator, scaled.denominator)
    if 2 * r >= scaled.denominator:
        q += 1
    digits = str(q).rjust(PRECISION + 1, "0")
    sign = "-" if x < 0 and q else ""
    return f"{sign}{digits[:-PRECISION]}.{digits[-PRECISION:]}"


def parse_window(text: str):
    parts = [xn.as_rational(p) for p in text.split(",")]
    if len(parts) != 4:
        raise InputError("window must be x0,y0,x1,y1")
    x0, y0, x1, y1 = parts
    if x1 <= x0 or y1 <= y0:
        raise InputError("window must have positive width and height")
    return x0, y0, x1, y1


def _clip(p, d, t0, t1, window):
    """Clip ``p + t d`` for ``t0 <= t <= t1`` (``t1`` may be ``None``) to the window."""
    lo, hi = t0, t1
    for k, (a, b) in enumerate(((window[0], window[2]), (window[1], window[3]))):
        if d[k] == 0:
            if not a <= p[k] <= b:
                return None
            continue
        ta, tb = (a - p[k]) / d[k], (b - p[k]) / d[k]
        if ta > tb:
            ta, tb = tb, ta
        lo = max(lo, ta)
        hi = tb if hi is None else min(hi, tb)
    if hi is None or lo > hi or (lo == hi and t1 != t0):
        return None
    return lo, hi


def _inside(p, window):
    return window[0] <= p[0] <= window[2] and window[1] <= p[1] <= window[3]


class _Canvas:
    def __init__(self, window):
        self.window = window
        self.lines, self.dots, self.labels = [], [], []

    def xy(self, p):
        return fmt((p[0] - self.window[0]) * SCALE), fmt((self.window[3] - p[1]) * SCALE)

    def segment(self, a, b, weight=1, arrow=False, css="edge"):
        (x1, y1), (x2, y2) = self.xy(a), self.xy(b)
        marker = ' marker-end="url(#arrow)"' if arrow else ""
        self.lines.append(f'<line class="{css}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"{marker}/>')
        if weight > 1:
            mx, my = self.xy(((a[0] + b[0]) / 2, (a[1] + b[1]) / 2))
            self.labels.append(f'<text x="{mx}" y="{my}">{weight}</text>')

    def dot(self, p):
        x, y = self.xy(p)
        self.dots.append(f'<circle cx="{x}" cy="{y}" r="3"/>')

    def document(self):
        w = fmt((self.window[2] - self.window[0]) * SCALE)
        h = fmt((self.window[3] - self.window[1]) * SCALE)
        head = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
            '<defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" markerHeight="6" '
            'orient="auto"><path d="M0,0 L10,5 L0,10 z"/></marker></defs>',
            '<g stroke="black" stroke-width="1.5" fill="none">',
        ]
        body = sorted(set(self.lines))
        tail = ["</g>", '<g fill="black">'] + sorted(set(self.dots)) + ["</g>"]
        tail += ['<g font-size="10" font-family="sans-serif">'] + sorted(set(self.labels)) + ["</g>", "</svg>"]
        return "\n".join(head + body + tail) + "\n"


def _periods(target):
    """Generators of the translation lattice of the target in the plane."""
    if isinstance(target, Plane):
        return []
    if isinstance(target, Cylinder):
        M = target.torus.rational_M()
        return [(0, M[0][0])]
    M = target.rational_M()
    return [tuple(M[i][j] for i in range(2)) for j in range(2)]


def _translates(periods):
    if not periods:
        return [(0, 0)]
    out = []
    for m in itertools.product(range(-_TRANSLATE_RADIUS, _TRANSLATE_RADIUS + 1), repeat=len(periods)):
        v = (Fraction(0), Fraction(0))
        for c, p in zip(m, periods):
            v = xn.vec_add(v, xn.vec_scale(c, p))
        out.append(v)
    return out


def _box(points, pad):
    xs = [p[0] for p in points] or [0]
    ys = [p[1] for p in points] or [0]
    return min(xs) - pad, min(ys) - pad, max(xs) + pad, max(ys) + pad


def _default_window(c: CurveMap):
    periods = _periods(c.target)
    if isinstance(c.target, TropicalTorus):
        corners = [xn.vec_add(xn.vec_scale(a, periods[0]), xn.vec_scale(b, periods[1])) for a in (0, 1) for b in (0, 1)]
        return _box(corners, 0)
    pts = [c.images[v] for v in c.graph.vertices]
    if isinstance(c.target, Cylinder):
        x0, _, x1, _ = _box(pts, 1)
        return x0, Fraction(0), x1, periods[0][1]
    return _box(pts, 1)


def render_curve(c: CurveMap, window=None) -> str:
    if c.dim != 2:
        raise UnsupportedDimension(f"cannot render a curve in dimension {c.dim}")
    window = window or _default_window(c)
    canvas = _Canvas(window)
    shifts = _translates(_periods(c.target))
    for i, e in enumerate(c.graph.edges):
        u = c.directions[i]
        start = c.images[e.tail]
        if e.is_ray:
            d, t1 = u, None
        else:
            d, t1 = c.edge_vector(i), Fraction(1)
        for s in shifts:
            p = xn.vec_add(start, s)
            span = _clip(p, d, Fraction(0), t1, window)
            if span is None:
                continue
            a, b = xn.vec_add(p, xn.vec_scale(span[0], d)), xn.vec_add(p, xn.vec_scale(span[1], d))
            if a == b:
                continue
            canvas.segment(a, b, e.weight, arrow=e.is_ray)
    for v in c.graph.vertices:
        for s in shifts:
            p = xn.vec_add(c.images[v], s)
            if _inside(p, window):
                canvas.dot(p)
    return canvas.document()


def render_subdivision(sub: PeriodicSubdivision, window=None) -> str:
    td = sub.theta
    if td.polarization.torus.n != 2:
        raise UnsupportedDimension("only 2-dimensional subdivisions are rendered")
    periods = [tuple(td.translations[i][j] for i in range(2)) for j in range(2)]
    if window is None:
        corners = [xn.vec_add(xn.vec_scale(a, periods[0]), xn.vec_scale(b, periods[1])) for a in (0, 1) for b in (0, 1)]
        window = _box(corners, 0)
    canvas = _Canvas(window)
    for cell in sub.cells:
        pts = [tuple(Fraction(x) for x in p) for p in cell.points]
        for face in sd._hull_facets(pts):
            ends = sorted(pts[i] for i in face)
            a, b = ends[0], ends[-1]
            for s in _translates(periods):
                p = xn.vec_add(a, s)
                d = xn.vec_sub(b, a)
                span = _clip(p, d, Fraction(0), Fraction(1), window)
                if span is None or span[0] == span[1]:
                    continue
                canvas.segment(xn.vec_add(p, xn.vec_scale(span[0], d)), xn.vec_add(p, xn.vec_scale(span[1], d)), css="cell")
        for s in _translates(periods):
            for p in pts:
                q = xn.vec_add(p, s)
                if _inside(q, window):
                    canvas.dot(q)
    return canvas.document()


def render(obj, window=None) -> str:
    if isinstance(obj, CurveMap):
        return render_curve(obj, window)
    if isinstance(obj, PeriodicSubdivision):
        return render_subdivision(obj, window)
    raise InputError(f"cannot render {type(obj).__name__}")
