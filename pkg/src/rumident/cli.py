"""Command-line front end: ``rumident <subcommand> ...``.

Every run prints one JSON envelope ``{"ok", "result", "meta"}`` on stdout.
Exit status is 0 on success, 2 on a domain error (infeasible rule,
inequivalent inputs, support violation, ...) and 1 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import platform
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__, graphs, ident, io, parametric
from .choice import Distribution, moebius_inverse, phi, rationalize
from .errors import ConsistencyError, DomainError, SwapFeasibilityError
from .prefs import Universe, enumerate_conjugate_squares, enumerate_orders
from .ryser import nullspace_phi, ryser_basis
from .zipper import apply_swaps, zipper


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _versions() -> dict:
    import networkx
    import numpy

    return {
        "rumident": __version__,
        "python": platform.python_version(),
        "numpy": numpy.__version__,
        "networkx": networkx.__version__,
    }


# -- argument helpers -------------------------------------------------------


def _universe(args) -> Universe | None:
    if getattr(args, "universe", None):
        return Universe.of(args.universe)
    return None


def _support(args, u: Universe, default=None) -> ident.SupportRestriction | None:
    text = getattr(args, "support", None)
    if not text:
        return default
    if Path(text).is_file():
        data = io.read_json(text)
        items = data["support"] if isinstance(data, dict) else data
    else:
        items = text.split(";") if ";" in text or not u.single_char else text.split(",")
    return ident.SupportRestriction.of(u.parse_order(x) for x in items)


def _dist(path: str, u: Universe | None = None) -> tuple[Distribution, Universe]:
    return io.measure_from_json(io.read_json(path), u)


def _fmt(u: Universe):
    return lambda m: io.measure_to_json(m, u)


def _orders(u: Universe, orders) -> list[str]:
    return [u.order_str(o) for o in orders]


def _square(s, u: Universe) -> dict:
    return {"top": _orders(u, s.top), "swapped": _orders(u, s.swapped), "k": s.k}


def _need_universe(args) -> Universe:
    u = _universe(args)
    if u is None:
        raise UsageError("--universe is required")
    return u


# -- subcommands ------------------------------------------------------------


def cmd_orders(args):
    u = _need_universe(args)
    return {"labels": list(u.labels), "orders": _orders(u, enumerate_orders(u))}


def cmd_squares(args):
    u = _need_universe(args)
    sq = enumerate_conjugate_squares(u)
    return {"labels": list(u.labels), "count": len(sq), "squares": [_square(s, u) for s in sq]}


def cmd_basis(args):
    u = _need_universe(args)
    if args.kind == "ryser":
        vecs = ryser_basis(u.n).vectors
    else:
        vecs = nullspace_phi(u.n)
    return {"labels": list(u.labels), "kind": args.kind, "dim": len(vecs), "basis": [io.measure_to_json(v, u) for v in vecs]}


def cmd_check_ident(args):
    u = _need_universe(args)
    s = _support(args, u)
    if s is None:
        raise UsageError("--support is required")
    return {
        "identified": ident.is_identified_support(s),
        "has_separable_pair": ident.has_separable_pair(s),
        "separable_pairs": [
            {"pair": _orders(u, (a, b)), "k": k} for a, b, k in ident.separable_pairs(s.allowed)
        ],
    }


def cmd_point_ident(args):
    mu, u = _dist(args.dist, _universe(args))
    return {
        "identified": ident.point_identified_unrestricted(mu),
        "separable_pairs": [{"pair": _orders(u, (a, b)), "k": k} for a, b, k in ident.separable_pairs(mu.support())],
    }


def cmd_moebius(args):
    data = io.read_json(args.input)
    if "weights" in data:
        mu, u = io.measure_from_json(data, _universe(args))
        r = phi(mu)
    else:
        r, u = io.rule_from_json(data, _universe(args))
    q = moebius_inverse(r)
    out = io.rule_to_json(q, u, with_labels=True)
    out["negative_cells"] = [{"x": u.labels[x], "menu": u.format_menu(A)} for x, A in q.negative_cells()]
    return out


def cmd_rationalize(args):
    data = io.read_json(args.rule)
    if "weights" in data:
        mu, u = io.measure_from_json(data, _universe(args))
        r = phi(mu)
    else:
        r, u = io.rule_from_json(data, _universe(args))
    mu = rationalize(r)
    if mu is None:
        cells = moebius_inverse(r).negative_cells()
        raise DomainError(
            "rule is not rationalizable"
            + (f"; {len(cells)} negative Block-Marschak value(s)" if cells else "")
        )
    return io.measure_to_json(mu, u, with_labels=True)


def cmd_equiv_class(args):
    mu, u = _dist(args.dist, _universe(args))
    s = _support(args, u)
    return ident.equivalence_class(mu, s).to_json(_fmt(u))


def cmd_extreme(args):
    mu, u = _dist(args.dist, _universe(args))
    return {"extreme": ident.is_extreme(mu, _support(args, u))}


def cmd_enumerate_vertices(args):
    mu, u = _dist(args.dist, _universe(args))
    v = ident.enumerate_extreme_points(mu, _support(args, u), cap=args.cap)
    return {"truncated": v.truncated, "count": len(v.points), "vertices": [io.measure_to_json(p, u) for p in v.points]}


def _sequence_json(seq, u: Universe) -> dict:
    return {"labels": list(u.labels), "steps": io.steps_to_json(seq, u), "provenance": list(seq.provenance), "meta": seq.meta}


def cmd_zipper(args):
    src, u = _dist(args.source, _universe(args))
    dst, _ = _dist(args.target, u)
    return _sequence_json(zipper(src, dst), u)


def cmd_apply_swaps(args):
    mu, u = _dist(args.dist, _universe(args))
    seq = io.steps_from_json(io.read_json(args.swaps), u)
    out = apply_swaps(mu, seq)
    return io.measure_to_json(out, u, with_labels=True)


def _model(args) -> parametric.ParametricModel:
    if args.model == "logit":
        u = _need_universe(args)
        base = args.base if args.base is not None else u.labels[0]
        return parametric.logit_model(u, base)
    if args.model == "mixture":
        if not args.components:
            raise UsageError("--components is required for a mixture")
        u = _universe(args)
        comps = []
        for path in args.components:
            mu, u = _dist(path, u)
            comps.append(mu)
        return parametric.mixture_model(comps)
    if args.model == "external":
        if not args.model_file:
            raise UsageError("--model-file is required for an external model")
        return parametric.load_external_model(args.model_file, _need_universe(args))
    raise UsageError(f"unknown model {args.model!r}")


def _vector(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def cmd_jacobian(args):
    model = _model(args)
    if args.theta is None:
        raise UsageError("--theta is required")
    return parametric.jacobian_fbar(model, _vector(args.theta), h=args.h, tol=args.tol).to_json()


def _grid(args, model) -> list:
    if args.grid_file:
        with open(args.grid_file) as fh:
            return [json.loads(line)["theta"] for line in fh if line.strip()]
    if model.kind == "mixture":
        points = int(args.grid) if args.grid else 11
        return parametric.simplex_grid(model.dim_theta + 1, points)
    spec = args.grid or "-2:2:11"
    try:
        lo, hi, points = spec.split(":")
        return parametric.box_grid(model.dim_theta, float(lo), float(hi), int(points))
    except ValueError:
        raise UsageError("--grid expects lo:hi:points") from None


def cmd_scan(args):
    model = _model(args)
    report = parametric.scan_identification(model, _grid(args, model), h=args.h, tol=args.tol).to_json()
    if not args.full:
        report.pop("reports")
    return report


GRAPH_KINDS = ("conjugate", "line", "multigraph", "condensation", "polytope", "top-down")


def _graph(u: Universe, kind: str):
    if kind == "polytope":
        return graphs.polytope_graph(u)
    p = graphs.build_pipeline(u)
    if kind == "top-down":
        return graphs.top_down_view(p["line"])
    return {"conjugate": p["conjugate"], "line": p["line"], "multigraph": p["multigraph"], "condensation": p["condensation"]}[kind]


def cmd_graph(args):
    u = _need_universe(args)
    G = _graph(u, args.kind)
    if args.format == "dot":
        text = graphs.to_dot(G, u, name=args.kind.replace("-", "_"))
        if args.out:
            Path(args.out).write_text(text)
            args.out = None
        return {"format": "dot", "text": text}
    return graphs.to_json(G, u)


def cmd_check_observation(args):
    u = _need_universe(args)
    p = graphs.build_pipeline(u)
    cond = {tuple(sorted(e)) for e in p["condensation"].edges()}
    poly = {tuple(sorted(e)) for e in graphs.polytope_graph(u).edges()}
    cycles = graphs.find_swap_cycles(p["multigraph"])
    squares = list(enumerate_conjugate_squares(u))
    return {
        "observation_holds": cond == poly,
        "edges": len(poly),
        "missing": [_orders(u, e) for e in sorted(poly - cond)],
        "extra": [_orders(u, e) for e in sorted(cond - poly)],
        "swap_cycles_match_squares": len(cycles) == len(squares) and set(cycles) == set(squares),
        "squares": len(squares),
        "top_down_matches": {tuple(sorted(e)) for e in graphs.top_down_view(p["line"]).edges()} == cond,
    }


# -- reproduction bundles --------------------------------------------------


def _expect(checks: list, name: str, got, want):
    checks.append({"check": name, "got": _plain(got), "expected": _plain(want), "pass": got == want})


def _plain(x):
    if isinstance(x, Fraction):
        return io.rational(x)
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


def _repro_fishburn():
    u = Universe.of("abcd")
    o = {s: u.parse_order(s) for s in ("abcd", "badc", "abdc", "bacd")}
    m12 = Distribution.uniform(4, [o["abcd"], o["badc"]])
    m34 = Distribution.uniform(4, [o["abdc"], o["bacd"]])
    S = ident.SupportRestriction.of(o.values())
    checks = []
    _expect(checks, "phi(mu12) == phi(mu34)", phi(m12) == phi(m34), True)
    rep = ident.equivalence_class(m12, S)
    _expect(checks, "class_dim", rep.class_dim, 1)
    verts = ident.enumerate_extreme_points(m12, S).points
    _expect(checks, "vertices", sorted(map(tuple, (sorted(_orders(u, v.support())) for v in verts))),
            sorted([("abcd", "badc"), ("abdc", "bacd")]))
    seq = zipper(m12, m34)
    _expect(checks, "zipper steps", len(seq), 1)
    _expect(checks, "zipper weight", seq.steps[0].weight, Fraction(1, 2))
    _expect(checks, "zipper square", _square(seq.steps[0].square, u),
            {"top": ["abcd", "badc"], "swapped": ["abdc", "bacd"], "k": 2})
    _expect(checks, "apply_swaps reproduces mu34", apply_swaps(m12, seq) == m34, True)
    _expect(checks, "support identified", ident.is_identified_support(S), False)
    _expect(checks, "flow feasible", graphs.check_flow(m12)[1], True)
    return checks


SIX = ("abcdef", "baefcd", "cdbafe", "abefcd", "bacdfe", "cdbaef")


def _repro_six():
    u = Universe.of("abcdef")
    six = [u.parse_order(s) for s in SIX]
    m123 = Distribution.uniform(6, six[:3])
    m456 = Distribution.uniform(6, six[3:])
    S = ident.SupportRestriction.of(six)
    checks = []
    _expect(checks, "mu123 equivalent to mu456", phi(m123) == phi(m456), True)
    _expect(checks, "has_separable_pair", ident.has_separable_pair(S), False)
    _expect(checks, "support identified", ident.is_identified_support(S), False)
    seq = zipper(m123, m456)
    _expect(checks, "zipper weights", [s.weight for s in seq], [Fraction(1, 3)] * 2)
    _expect(checks, "apply_swaps reproduces mu456", apply_swaps(m123, seq) == m456, True)
    rep = ident.equivalence_class(Distribution.uniform(6, six), S)
    found = {tuple(sorted(_orders(u, w.support()))) for w in rep.witnesses or ()}
    _expect(checks, "uniform-six witnesses include mu123 and mu456",
            {tuple(sorted(SIX[:3])), tuple(sorted(SIX[3:]))} <= found, True)
    return checks


def _repro_separable_pairs():
    checks = []
    u4, u6 = Universe.of("abcd"), Universe.of("abcdef")
    cases = [
        ("Fishburn four", u4, ("abcd", "badc", "abdc", "bacd"), True, False),
        ("{abcd, abdc}", u4, ("abcd", "abdc"), False, True),
        ("six orders", u6, SIX, False, False),
    ]
    for name, u, orders, sep, idf in cases:
        S = ident.SupportRestriction.of(u.parse_order(o) for o in orders)
        _expect(checks, f"{name}: has_separable_pair", ident.has_separable_pair(S), sep)
        _expect(checks, f"{name}: identified", ident.is_identified_support(S), idf)
    dists = [
        ("point mass abcd", Distribution.point_mass(u4.parse_order("abcd")), True),
        ("mu12", Distribution.uniform(4, [u4.parse_order("abcd"), u4.parse_order("badc")]), False),
        ("mu123", Distribution.uniform(6, [u6.parse_order(o) for o in SIX[:3]]), False),
    ]
    for name, mu, want in dists:
        got = ident.point_identified_unrestricted(mu)
        _expect(checks, f"{name}: point identified", got, want)
        if mu.n <= 5:
            _expect(checks, f"{name}: class_dim is 0 under all orders", ident.equivalence_class(mu).class_dim == 0, want)
    return checks


def _repro_graph_observation():
    checks = []
    u = Universe.of("abcd")
    p = graphs.build_pipeline(u)
    _expect(checks, "observation n=4", graphs.observation_holds(u), True)
    _expect(checks, "swap cycles == squares", set(graphs.find_swap_cycles(p["multigraph"])) == set(enumerate_conjugate_squares(u)), True)
    _expect(checks, "conjugate graph 4-cycles == squares", set(graphs.segment_graph_squares(p["conjugate"])) == set(enumerate_conjugate_squares(u)), True)
    m12 = Distribution.uniform(4, [u.parse_order("abcd"), u.parse_order("badc")])
    _expect(checks, "flow feasible for mu12", graphs.check_flow(m12)[1], True)
    return checks


REPRO = {
    "fishburn": _repro_fishburn,
    "six-orders": _repro_six,
    "separable-pairs": _repro_separable_pairs,
    "graph-observation": _repro_graph_observation,
}


def cmd_repro(args):
    checks = REPRO[args.example]()
    failed = [c["check"] for c in checks if not c["pass"]]
    result = {"example": args.example, "passed": not failed, "checks": checks}
    if failed:
        raise ConsistencyError(f"{len(failed)} reproduction check(s) failed: {', '.join(failed)}", result)
    return result


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--universe", help="labels, e.g. abcd or a1,a2,a3")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="also write the result JSON to this path")

    p = _Parser(prog="rumident", description="Identification tools for random utility models.")
    p.add_argument("--version", action="version", version=f"rumident {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    add("orders", cmd_orders, "enumerate linear orders")
    add("squares", cmd_squares, "enumerate conjugate squares")
    sp = add("basis", cmd_basis, "basis of the Ryser subspace or of ker phi")
    sp.add_argument("--kind", choices=("ryser", "nullspace"), default="ryser")
    sp = add("check-ident", cmd_check_ident, "is a support restriction identified?")
    sp.add_argument("--support", help="comma-separated orders (';' for multi-character labels) or a JSON file")
    sp = add("point-ident", cmd_point_ident, "is a distribution the only one with its choice rule?")
    sp.add_argument("--dist", required=True)
    sp = add("moebius", cmd_moebius, "Block-Marschak values of a rule or distribution")
    sp.add_argument("--input", required=True)
    sp = add("rationalize", cmd_rationalize, "find a distribution inducing a rule")
    sp.add_argument("--rule", required=True)
    for name, func, help_ in (
        ("equiv-class", cmd_equiv_class, "dimension and witnesses of an equivalence class"),
        ("extreme", cmd_extreme, "is a distribution extreme in its class?"),
        ("enumerate-vertices", cmd_enumerate_vertices, "all extreme points of a class"),
    ):
        sp = add(name, func, help_)
        sp.add_argument("--dist", required=True)
        sp.add_argument("--support")
        if name == "enumerate-vertices":
            sp.add_argument("--cap", type=int, default=1000)
    sp = add("zipper", cmd_zipper, "swap sequence between equivalent distributions")
    sp.add_argument("--from", dest="source", required=True)
    sp.add_argument("--to", dest="target", required=True)
    sp = add("apply-swaps", cmd_apply_swaps, "apply a swap sequence to a distribution")
    sp.add_argument("--dist", required=True)
    sp.add_argument("--swaps", required=True)
    for name, func, help_ in (
        ("jacobian", cmd_jacobian, "projected Jacobian of a parametric model"),
        ("scan", cmd_scan, "Jacobian rank over a parameter grid"),
    ):
        sp = add(name, func, help_)
        sp.add_argument("--model", choices=("logit", "mixture", "external"), required=True)
        sp.add_argument("--base", help="logit: alternative with utility fixed at 0")
        sp.add_argument("--components", nargs="+", help="mixture: distribution files")
        sp.add_argument("--model-file", help="external: JSON lines of theta/weights records")
        sp.add_argument("--h", type=float, default=parametric.DEFAULT_H)
        sp.add_argument("--tol", type=float, default=parametric.DEFAULT_TOL)
        if name == "jacobian":
            sp.add_argument("--theta", help="comma-separated parameter vector")
        else:
            sp.add_argument("--grid", help="lo:hi:points (box) or points per edge (mixture)")
            sp.add_argument("--grid-file", help="JSON lines with a theta field")
            sp.add_argument("--full", action="store_true", help="include per-point reports")
    sp = add("graph", cmd_graph, "export a segment or order graph")
    sp.add_argument("--kind", choices=GRAPH_KINDS, default="conjugate")
    sp.add_argument("--format", choices=("json", "dot"), default="json")
    add("check-observation", cmd_check_observation, "condensed multigraph vs polytope graph")
    sp = add("repro", cmd_repro, "replay a worked example and check its outputs")
    sp.add_argument("--example", choices=sorted(REPRO), required=True)
    return p


def _error(exc: BaseException) -> dict:
    err = {"type": type(exc).__name__, "message": str(exc.args[0]) if exc.args else str(exc)}
    if isinstance(exc, SwapFeasibilityError):
        err["step"] = exc.step_index
    if isinstance(exc, ConsistencyError) and len(exc.args) > 1:
        err["detail"] = exc.args[1]
    return err


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    start = time.perf_counter()
    seed = None
    try:
        args = build_parser().parse_args(argv)
        seed = args.seed
        result = args.func(args)
        code, envelope = 0, {"ok": True, "result": result}
    except DomainError as exc:
        code, envelope = 2, {"ok": False, "error": _error(exc)}
    except (UsageError, ValueError, KeyError, OSError, json.JSONDecodeError, ConsistencyError) as exc:
        code, envelope = 1, {"ok": False, "error": _error(exc)}
        args = None
    envelope["meta"] = {"versions": _versions(), "seed": seed, "timing": round(time.perf_counter() - start, 6)}
    text = json.dumps(envelope, indent=2, default=_plain)
    if code == 0 and getattr(args, "out", None):
        io.write_json(envelope["result"], args.out)
    print(text, file=stdout)
    return code


def main() -> None:
    sys.exit(run())
