"""``troplib`` command line: JSON in, JSON (or SVG) out.

Exit status is 0 on success, 1 when the answer is negative or unverified and
2 on malformed input.  Errors are reported as JSON on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from . import exactnum as xn
from .chow import divide_cycle, fixed_sum_relation, graph_construction, verify_certificate
from .curve import (
    CurveMap,
    Divisor,
    GraphPoint,
    MetricGraph,
    NotEquivalent,
    PLFunction,
    abel_jacobi,
    balancing_check,
    divide_class,
    effective_balance_check,
    fundamental_cycles,
    inertia,
    linear_equivalence,
    normalize_mixed_vertices,
    period_matrix,
    pullback_curve,
)
from .errors import IndeterminateSign, InputError, TropError
from .novikov import gauss_norm, parse_polynomial, polytope_valuation, trop_hypersurface
from .render import parse_window, render
from .theta import GENERATOR, ThetaData, find_regular_theta, regular_subdivision, theta_curve_2d, theta_eval
from .torus import Polarization, TropicalTorus, Unknown, find_polarization, no_curve_certificate

SEED_ENV = "TROPLIB_SEED"


class Outcome:
    """Payload plus exit status; ``text`` outputs are written verbatim."""

    def __init__(self, payload, status=0, text=False):
        self.payload, self.status, self.text = payload, status, text


# ---------------------------------------------------------------- input helpers


def _load(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _vector(text):
    try:
        return tuple(xn.as_rational(p) for p in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad vector {text!r}") from exc


def _indices(text):
    if text is None:
        return None
    try:
        return tuple(int(p) for p in text.split(",") if p)
    except ValueError as exc:
        raise InputError(f"bad edge list {text!r}") from exc


def _graph(data):
    if "graph" in data:
        data = data["graph"]
    return MetricGraph.from_json(data)


def _curve(data):
    if data.get("kind") == "EquivalenceCertificate":
        data = data["curve"]
    return CurveMap.from_json(data)


def _torus(data):
    if "torus" in data and "M" not in data:
        data = data["torus"]
    return TropicalTorus.from_json(data)


def _theta(data):
    if "theta" in data:
        data = data["theta"]
    return ThetaData.from_json(data)


def _vertex(g, name):
    if name is None:
        return g.vertices[0]
    for v in g.vertices:
        if str(v) == name:
            return v
    raise InputError(f"unknown vertex {name!r}")


def _seed(args):
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        raise InputError(f"this command needs --seed or {SEED_ENV}")
    try:
        return int(env)
    except ValueError as exc:
        raise InputError(f"{SEED_ENV} must be an integer") from exc


def _mat_json(m):
    return [[x.to_json() if xn.is_symbolic(x) else xn.fmt_rational(xn.to_rational(x)) for x in r] for r in m]


# ---------------------------------------------------------------- commands


def cmd_balance_check(args):
    report = balancing_check(_curve(_load(args.curve)))
    return Outcome(report.to_json(), 0 if report.balanced else 1)


def cmd_period_matrix(args):
    g = _graph(_load(args.graph))
    tree, chords, cycles = fundamental_cycles(g, _indices(args.tree))
    Q = period_matrix(g, tree)
    out = {"tree": sorted(tree), "chords": list(chords), "cycles": [list(c) for c in cycles], "matrix": _mat_json(Q)}
    det = xn.det(Q)
    out["det"] = det.to_json() if xn.is_symbolic(det) else xn.fmt_rational(xn.to_rational(det))
    try:
        out["det_sign"] = str(xn.sign_of(det))
        pos, neg = inertia(Q)
        out["inertia"] = {"positive": pos, "negative": neg}
    except IndeterminateSign as exc:
        out["det_sign"] = "Indeterminate"
        out["inertia"] = {"error": str(exc)}
    return Outcome(out)


def cmd_abel_jacobi(args):
    g = _graph(_load(args.graph))
    D = Divisor.from_json(g, _load(args.divisor))
    base = GraphPoint(vertex=_vertex(g, args.base)) if D.degree() else None
    aj = abel_jacobi(g, base, D, tree=_indices(args.tree), mixed=args.mixed)
    return Outcome(aj.to_json())


def cmd_lin_equiv(args):
    g = _graph(_load(args.graph))
    D1 = Divisor.from_json(g, _load(args.d1))
    D2 = Divisor.from_json(g, _load(args.d2))
    res = linear_equivalence(g, D1, D2, method=args.method)
    if isinstance(res, NotEquivalent):
        return Outcome(res.to_json(), 1)
    return Outcome({"result": "Equivalent", "witness": res.to_json()})


def cmd_divide(args):
    g = _graph(_load(args.graph))
    D = Divisor.from_json(g, _load(args.divisor))
    E = divide_class(g, D, args.k, tree=_indices(args.tree))
    return Outcome({"k": args.k, "divisor": E.to_json()})


def cmd_theta_eval(args):
    td = _theta(_load(args.theta))
    value, argmax = theta_eval(td, _vector(args.point))
    return Outcome({"value": xn.fmt_rational(value), "argmax": [list(a) for a in argmax]})


def cmd_theta_search(args):
    pol = Polarization.from_json(_load(args.polarization))
    return Outcome(find_regular_theta(pol, _seed(args), max_k=args.max_k).to_json())


def cmd_theta_curve(args):
    td = _theta(_load(args.theta))
    return Outcome(theta_curve_2d(td, regular_subdivision(td)).to_json())


def cmd_graph_construct(args):
    c = _curve(_load(args.curve))
    f = PLFunction.from_json(_load(args.function))
    return Outcome(graph_construction(c, f).to_json())


def cmd_divide_cycle(args):
    pol = Polarization.from_json(_load(args.polarization))
    seed = _seed(args)
    certs = divide_cycle(pol, _vector(args.b), _vector(args.b0), args.k, seed, max_k=args.max_k)
    return Outcome({"seed": seed, "generator": GENERATOR, "certificates": [c.to_json() for c in certs]})


def cmd_fixed_sum(args):
    torus = _torus(_load(args.torus))
    pts = [_vector(getattr(args, n)) for n in "abcd"]
    return Outcome(fixed_sum_relation(torus, *pts, _vector(args.u)).to_json())


def cmd_polarization(args):
    res = find_polarization(_torus(_load(args.torus)), bound=args.bound)
    if isinstance(res, Polarization):
        return Outcome({"kind": "Polarization", **res.to_json()})
    return Outcome(res.to_json(), 1 if isinstance(res, Unknown) else 0)


def cmd_no_curve(args):
    return Outcome(no_curve_certificate(_torus(_load(args.torus))).to_json())


def cmd_normalize_mixed(args):
    return Outcome(normalize_mixed_vertices(_curve(_load(args.curve)), xn.as_rational(args.length)).to_json())


def cmd_effective_check(args):
    data = _load(args.vertex)
    ok = effective_balance_check(data["directions"], data["weights"])
    return Outcome({"effective": ok}, 0 if ok else 1)


def cmd_pullback(args):
    return Outcome(pullback_curve(_curve(_load(args.curve)), args.k).to_json())


def cmd_val(args):
    F = parse_polynomial(args.expression)
    out = {"expression": str(F)}
    if args.polytope:
        verts = [_vector(p) for p in args.polytope.split(";")]
        out["polytope_valuation"] = xn.fmt_rational(polytope_valuation(F, verts))
    elif F.is_zero():
        out["val"] = "inf"
    elif all(not any(a) for a in F.support()):
        out["val"] = xn.fmt_rational(F.terms[0][1].val())
    else:
        out["gauss_norm"] = xn.fmt_rational(gauss_norm(F))
    return Outcome(out)


def cmd_trop_hypersurface(args):
    res = trop_hypersurface(parse_polynomial(args.expression))
    if isinstance(res, list):
        return Outcome({"bend_points": [p.to_json() for p in res]})
    return Outcome(res.to_json())


def cmd_verify_certificate(args):
    data = _load(args.certificate)
    certs = data["certificates"] if isinstance(data, dict) and "certificates" in data else data
    if not isinstance(certs, list):
        certs = [certs]
    reports = [verify_certificate(c) for c in certs]
    ok = bool(reports) and all(r.ok for r in reports)
    return Outcome({"verified": ok, "reports": [r.to_json() for r in reports]}, 0 if ok else 1)


def cmd_render(args):
    data = _load(args.object)
    window = parse_window(args.window) if args.window else None
    if isinstance(data, dict) and "subdivision" in data and "theta" in data:
        obj = regular_subdivision(_theta(data))
    elif isinstance(data, dict) and "cells" in data:
        obj = regular_subdivision(_theta(data))
    else:
        obj = _curve(data)
    return Outcome(render(obj, window), text=True)


# ---------------------------------------------------------------- parser


def build_parser():
    p = argparse.ArgumentParser(prog="troplib", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the result here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true", help="pretty-print JSON")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_text, *positional):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        for arg in positional:
            sp.add_argument(arg)
        sp.set_defaults(func=func)
        return sp

    def seeded(sp):
        sp.add_argument("--seed", type=int, help=f"generator seed (default ${SEED_ENV})")

    add("balance-check", cmd_balance_check, "signed balancing residuals of a curve", "curve")
    sp = add("period-matrix", cmd_period_matrix, "period matrix, determinant sign and inertia", "graph")
    sp.add_argument("--tree", help="comma-separated edge indices to prefer in the spanning tree")
    sp = add("abel-jacobi", cmd_abel_jacobi, "Abel-Jacobi image of a divisor", "graph", "divisor")
    sp.add_argument("--base", help="base vertex for divisors of nonzero degree")
    sp.add_argument("--tree")
    sp.add_argument("--mixed", action="store_true", help="allow mixed-sign edges")
    sp = add("lin-equiv", cmd_lin_equiv, "decide linear equivalence of two divisors", "graph", "d1", "d2")
    sp.add_argument("--method", choices=["auto", "chip-firing", "potential"], default="auto")
    sp = add("divide", cmd_divide, "divisor E with k E linearly equivalent to D", "graph", "divisor")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--tree")
    sp = add("theta-eval", cmd_theta_eval, "evaluate a tropical theta function", "theta")
    sp.add_argument("--point", required=True, help="comma-separated rational coordinates")
    sp = add("theta-search", cmd_theta_search, "search for a regular theta function", "polarization")
    seeded(sp)
    sp.add_argument("--max-k", type=int, default=6)
    add("theta-curve", cmd_theta_curve, "tropical theta curve on a 2-torus", "theta")
    add("graph-construct", cmd_graph_construct, "equivalence certificate from a curve and a PL function", "curve", "function")
    sp = add("divide-cycle", cmd_divide_cycle, "certificates for divisibility of [b] - [b0]", "polarization")
    sp.add_argument("--b", required=True)
    sp.add_argument("--b0", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--max-k", type=int, default=6)
    seeded(sp)
    sp = add("fixed-sum", cmd_fixed_sum, "relation a + b ~ c + d on a circle", "torus")
    for name in "abcd":
        sp.add_argument(f"--{name}", required=True)
    sp.add_argument("--u", required=True, help="primitive circle direction")
    sp = add("polarization", cmd_polarization, "find a polarization or certify none exists", "torus")
    sp.add_argument("--bound", type=int, default=10)
    add("no-curve", cmd_no_curve, "certify that a torus contains no tropical curves", "torus")
    sp = add("normalize-mixed", cmd_normalize_mixed, "remove mixed-sign vertices", "curve")
    sp.add_argument("--length", default="1")
    add("effective-check", cmd_effective_check, "is a balanced vertex still balanced with |weights|", "vertex")
    sp = add("pullback", cmd_pullback, "preimage under multiplication by k", "curve")
    sp.add_argument("--k", type=int, required=True)
    sp = add("val", cmd_val, "valuation, Gauss norm or polytope valuation", "expression")
    sp.add_argument("--polytope", help="vertices as 'x,y;x,y;...'")
    add("trop-hypersurface", cmd_trop_hypersurface, "tropicalization of a hypersurface", "expression")
    add("verify-certificate", cmd_verify_certificate, "re-check certificates from JSON alone", "certificate")
    sp = add("render", cmd_render, "SVG of a planar curve, torus curve or subdivision", "object")
    sp.add_argument("--window", help="x0,y0,x1,y1")
    return p


def _emit(outcome, args):
    if outcome.text:
        text = outcome.payload
    else:
        text = json.dumps(outcome.payload, indent=2 if args.verbose else None, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fail(err: dict, status: int):
    sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
    return status


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        outcome = args.func(args)
        _emit(outcome, args)
        return outcome.status
    except InputError as exc:
        return _fail(exc.to_json(), 2)
    except TropError as exc:
        return _fail(exc.to_json(), 1)
    except (KeyError, TypeError, ValueError) as exc:
        return _fail({"error": "InputError", "message": f"{type(exc).__name__}: {exc}"}, 2)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
