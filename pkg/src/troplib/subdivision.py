"""Exact polyhedral helpers: affine hulls, lower-hull facets, triangulations, volumes."""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import factorial

from . import exactnum as xn


def affine_dim(points) -> int:
    pts = [xn.as_vector(p) for p in points]
    if not pts:
        return -1
    diffs = [xn.vec_sub(p, pts[0]) for p in pts[1:]]
    if not diffs:
        return 0
    return xn.rank(diffs, len(pts[0]))


def plane_through(points, heights):
    """``(a, b)`` with ``heights[i] = a . points[i] + b``; ``None`` unless the points are affinely independent and full."""
    n = len(points[0])
    if len(points) != n + 1:
        raise ValueError("need n + 1 points")
    rows = [tuple(p) + (1,) for p in points]
    if xn.det(rows) == 0:
        return None
    sol = xn.solve(rows, tuple(heights))
    return tuple(sol[:n]), sol[n]


def lower_facets(points, heights):
    """Lower-hull facets of the lifted finite set ``(points[i], heights[i])``.

    Returns a list of ``(indices, a, b)``; ``indices`` lists every point lying on
    the supporting plane ``h = a . x + b``.
    """
    pts = [xn.as_vector(p) for p in points]
    hs = [xn.as_rational(h) for h in heights]
    n = len(pts[0])
    seen = {}
    for combo in itertools.combinations(range(len(pts)), n + 1):
        plane = plane_through([pts[i] for i in combo], [hs[i] for i in combo])
        if plane is None:
            continue
        a, b = plane
        gaps = [h - (xn._dot(a, p) + b) for p, h in zip(pts, hs)]
        if any(g < 0 for g in gaps):
            continue
        on = tuple(i for i, g in enumerate(gaps) if g == 0)
        seen.setdefault(on, (a, b))
    return [(on, a, b) for on, (a, b) in seen.items()]


def _affine_frame(points):
    """Coordinates of ``points`` in an affine frame of their hull."""
    p0 = points[0]
    basis = []
    for p in points[1:]:
        d = xn.vec_sub(p, p0)
        if xn.rank(basis + [d], len(p0)) > len(basis):
            basis.append(d)
    if not basis:
        return [()] * len(points)
    # pick coordinate rows that make the basis square and invertible
    cols = list(zip(*basis))
    rows = []
    for i, row in enumerate(cols):
        if xn.rank([cols[j] for j in rows] + [row], len(basis)) > len(rows):
            rows.append(i)
    square = [cols[i] for i in rows]
    return [tuple(xn.solve(square, tuple(xn.vec_sub(p, p0)[i] for i in rows))) for p in points]


def _hull_facets(coords):
    """Facets (index tuples) of the convex hull of full-dimensional ``coords``."""
    d = len(coords[0])
    facets = set()
    for combo in itertools.combinations(range(len(coords)), d):
        base = coords[combo[0]]
        diffs = [xn.vec_sub(coords[i], base) for i in combo[1:]]
        normal_space = xn.nullspace(diffs, d) if diffs else [tuple(1 if j == 0 else 0 for j in range(d))]
        if len(normal_space) != 1:
            continue
        normal = normal_space[0]
        side = [xn._dot(normal, xn.vec_sub(c, base)) for c in coords]
        if all(s >= 0 for s in side) or all(s <= 0 for s in side):
            facets.add(tuple(i for i, s in enumerate(side) if s == 0))
    return sorted(facets)


def triangulate(points):
    """Pulling triangulation of ``conv(points)`` as tuples of ambient points."""
    pts = sorted(set(xn.as_vector(p) for p in points))
    d = affine_dim(pts)
    if d <= 0:
        return [tuple(pts[:1])]
    coords = _affine_frame(pts)
    if d == 1:
        lo = min(range(len(pts)), key=lambda i: coords[i])
        hi = max(range(len(pts)), key=lambda i: coords[i])
        return [(pts[lo], pts[hi])]
    apex = 0
    out = []
    for facet in _hull_facets(coords):
        if apex in facet:
            continue
        for simplex in triangulate([pts[i] for i in facet]):
            out.append((pts[apex],) + simplex)
    return out


def simplex_volume(simplex) -> Fraction:
    p0 = simplex[0]
    rows = [xn.vec_sub(p, p0) for p in simplex[1:]]
    return abs(xn.det(rows)) / factorial(len(rows))


def volume(points) -> Fraction:
    """Full-dimensional volume of ``conv(points)`` (0 when not full-dimensional)."""
    pts = [xn.as_vector(p) for p in points]
    if affine_dim(pts) < len(pts[0]):
        return Fraction(0)
    return sum((simplex_volume(s) for s in triangulate(pts)), Fraction(0))


def hull_vertices(points):
    """Extreme points of ``conv(points)``."""
    pts = sorted(set(xn.as_vector(p) for p in points))
    out = []
    for i, p in enumerate(pts):
        others = pts[:i] + pts[i + 1:]
        if not others or not _in_hull(p, others):
            out.append(p)
    return out


def _in_hull(p, points):
    return any(barycentric(p, s) is not None for s in triangulate(points))


def barycentric(p, simplex):
    """Coordinates ``lam`` of ``p - s0`` along the simplex edges if ``p`` lies in the closed simplex."""
    s0 = simplex[0]
    basis = [xn.vec_sub(q, s0) for q in simplex[1:]]
    d = xn.vec_sub(p, s0)
    if not basis:
        return () if not any(d) else None
    cols = list(zip(*basis))
    rows = []
    for i, row in enumerate(cols):
        if xn.rank([cols[j] for j in rows] + [row], len(basis)) > len(rows):
            rows.append(i)
    lam = xn.solve([cols[i] for i in rows], tuple(d[i] for i in rows))
    if tuple(sum(l * b[i] for l, b in zip(lam, basis)) for i in range(len(d))) != d:
        return None
    if all(x >= 0 for x in lam) and sum(lam) <= 1:
        return tuple(lam)
    return None


def lattice_points_in_simplex(simplex):
    """All integer points of a full-dimensional lattice simplex."""
    n = len(simplex[0])
    lo = [min(int(p[i]) for p in simplex) for i in range(n)]
    hi = [max(int(p[i]) for p in simplex) for i in range(n)]
    return [q for q in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))) if barycentric(q, simplex) is not None]
