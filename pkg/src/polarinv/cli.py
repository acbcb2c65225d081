"""Command-line front end: analyze, compare, arcs, selftest."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from fractions import Fraction
from typing import Dict, List, Sequence

from .errors import InvalidInput, PolarInvError, PrecisionExhausted, TruncationCapExceeded
from .options import Options, escalate
from .polynomial import (
    BivarPoly,
    format_poly,
    mini_regular_check,
    parse_param_binding,
    parse_poly,
    parse_scalar,
    squarefree_check,
    tangent_cone,
)
from .scalars import MIN_PREC, Scalar, format_rational, format_scalar, scalar_to_json, sort_key

EXIT_OK = 0
EXIT_NOT_EQUIVALENT = 1
EXIT_INVALID = 2
EXIT_PRECISION = 3
EXIT_TRUNCATION = 4
EXIT_OTHER = 5


# ---------------------------------------------------------------------------
# Argument handling
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--precision", type=int, default=256, help="working precision in bits (default 256)")
    p.add_argument("--eps", default=None, help="zero-test threshold, e.g. 1e-40 or 1/2^100 (default 2^(-prec/2))")
    p.add_argument("--max-terms", type=int, default=64, help="cap on Puiseux terms per arc (default 64)")
    p.add_argument("--json", action="store_true", help="emit a JSON report on stdout")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    p.add_argument("--threads", type=int, default=1, help="worker threads for per-arc and per-line work")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarinv",
        description="Polar arcs, gradient canyons and the rescaling-class invariant of plane germs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="full report for one germ")
    a.add_argument("expr")
    a.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    a.add_argument("--shear", default=None, metavar="LAMBDA", help="analyze f(x + LAMBDA*y, y) instead of f")
    _add_common(a)

    c = sub.add_parser("compare", help="decide whether two invariants match under rescaling")
    c.add_argument("expr1")
    c.add_argument("expr2")
    c.add_argument("--param", action="append", default=[], metavar="NAME=VALUE", help="binding for both germs")
    c.add_argument("--param1", action="append", default=[], metavar="NAME=VALUE", help="binding for the first germ")
    c.add_argument("--param2", action="append", default=[], metavar="NAME=VALUE", help="binding for the second germ")
    c.add_argument("--shear", default=None, metavar="LAMBDA", help="shear both germs before comparing")
    _add_common(c)

    r = sub.add_parser("arcs", help="Puiseux roots of the expression, or polar arcs with --polar")
    r.add_argument("expr")
    r.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    r.add_argument("--shear", default=None, metavar="LAMBDA")
    r.add_argument("--polar", action="store_true", help="list the polar arcs of the germ instead")
    _add_common(r)

    s = sub.add_parser("selftest", help="golden values and oracle cross-checks")
    _add_common(s)
    return parser


def _parse_eps(text: str | None):
    if text is None:
        return None
    try:
        if "^" in text:
            return Fraction(parse_scalar(text).re)
        return Fraction(text)
    except (ValueError, ZeroDivisionError, PolarInvError) as exc:
        raise InvalidInput(f"--eps: cannot read {text!r}") from exc


def options_from_args(args) -> Options:
    if args.precision < MIN_PREC:
        raise InvalidInput(f"--precision must be at least {MIN_PREC}")
    if args.max_terms < 1:
        raise InvalidInput("--max-terms must be positive")
    eps = _parse_eps(args.eps)
    if eps is not None and eps <= 0:
        raise InvalidInput("--eps must be positive")
    return Options(
        prec=args.precision,
        eps=eps,
        max_terms=args.max_terms,
        max_prec=max(4096, args.precision),
        threads=max(1, args.threads),
        seed=args.seed,
    )


def _bindings(items: Sequence[str]) -> Dict[str, Scalar]:
    return dict(parse_param_binding(t) for t in items)


def load_germ(expr: str, params: Dict[str, Scalar], shear: str | None) -> BivarPoly:
    f = parse_poly(expr, params)
    if shear is not None:
        from .oracle import Shear, transform_germ

        f = transform_germ(f, Shear(parse_scalar(shear, params)))
    return f


def _options_json(o: Options) -> dict:
    d = asdict(o)
    d["eps"] = str(o.zero_eps)
    return d


def _emit(obj, as_json: bool, text: str):
    if as_json:
        print(json.dumps(obj, indent=2))
    else:
        print(text)


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def _line_text(lam: Scalar) -> str:
    return f"x = ({format_scalar(lam)})*y"


def analysis_report(f: BivarPoly, opts: Options):
    """(json dict, text) for the full pipeline."""
    from .invariant import format_packet, inv2

    cone = tangent_cone(f, opts.prec)
    mini = mini_regular_check(f)
    sqf = squarefree_check(f)
    head = [
        f"germ: {format_poly(f)}",
        f"multiplicity k: {cone.k}",
        f"mini-regular: {'yes' if mini else 'no'}",
        f"squarefree: {'yes' if sqf else 'no'}",
    ]
    I = inv2(f, opts)
    sigma = sorted(cone.sigma_lines, key=lambda t: sort_key(t[0]))
    lines = list(head)
    if sigma:
        lines.append("singular tangent lines:")
        lines += [f"  {_line_text(lam)}  (multiplicity {m})" for lam, m in sigma]
    lines.append("polar arcs:")
    for a in I.arcs:
        tag = "tangential" if a.is_tangential else "transverse"
        mult = f" mult={a.multiplicity}" if a.multiplicity > 1 else ""
        lines.append(
            f"  #{a.id} [class {a.arc.conj_class}.{a.arc.conj_index}] {a.arc}{mult}\n"
            f"      d_gr={format_rational(a.d_gr)} tangent={format_scalar(a.tangent_lambda)} ({tag}) "
            f"h0={format_rational(a.h0)} a0={format_scalar(a.a0)} canyon={a.canyon}"
        )
    canyons = _canyon_list(I.arcs)
    lines.append("canyons:")
    lines += [f"  C{cid}: arcs {members} degree {format_rational(deg)}" for cid, members, deg in canyons]
    if not I.packets:
        lines.append("Sigma_f empty; Inv2 = {}")
    else:
        lines.append("packets:")
        for n, d in enumerate(I.packets):
            lines.append(f"  L{n} {_line_text(d.lam)}: {format_packet(d)}")
        lines.append("Inv2 = {" + ", ".join(format_packet(d) for d in I.packets) + "}")
    analysis = {
        "k": cone.k,
        "mini_regular": mini,
        "squarefree": sqf,
        "sigma_lines": [{"lambda": scalar_to_json(lam), "mult": m} for lam, m in sigma],
        "polar_arcs": [a.to_json() for a in I.arcs],
        "canyons": [{"id": cid, "members": members, "degree": format_rational(deg)} for cid, members, deg in canyons],
        "inv2": I.to_json(),
    }
    return analysis, "\n".join(lines)


def _canyon_list(arcs):
    groups: Dict[int, list] = {}
    for a in arcs:
        groups.setdefault(a.canyon, []).append(a)
    return [(cid, [a.id for a in g], g[0].d_gr) for cid, g in sorted(groups.items())]


def cmd_analyze(args) -> int:
    opts = options_from_args(args)
    params = _bindings(args.param)
    f = load_germ(args.expr, params, args.shear)
    analysis, text = analysis_report(f, opts)
    obj = {
        "input": {"expr": args.expr, "params": {k: scalar_to_json(v) for k, v in params.items()}, "shear": args.shear},
        "options": _options_json(opts),
        "analysis": analysis,
    }
    _emit(obj, args.json, text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------


def cmd_compare(args) -> int:
    from .equivalence import Decision, format_report, inv2_equivalent
    from .invariant import inv2

    opts = options_from_args(args)
    shared = _bindings(args.param)
    p1 = {**shared, **_bindings(args.param1)}
    p2 = {**shared, **_bindings(args.param2)}
    f = load_germ(args.expr1, p1, args.shear)
    g = load_germ(args.expr2, p2, args.shear)

    def run(o: Options):
        return inv2_equivalent(inv2(f, o), inv2(g, o), o.zero_eps, o.prec)

    report = escalate(run, opts)
    obj = {
        "input": {
            "expr1": args.expr1,
            "expr2": args.expr2,
            "params1": {k: scalar_to_json(v) for k, v in p1.items()},
            "params2": {k: scalar_to_json(v) for k, v in p2.items()},
            "shear": args.shear,
        },
        "options": _options_json(opts),
        "comparison": report.to_json(),
    }
    _emit(obj, args.json, format_report(report))
    return EXIT_OK if report.decision is Decision.CONSISTENT else EXIT_NOT_EQUIVALENT


# ---------------------------------------------------------------------------
# arcs
# ---------------------------------------------------------------------------


def cmd_arcs(args) -> int:
    from .polar import polar_arcs
    from .puiseux import conjugates, puiseux_roots

    opts = options_from_args(args)
    params = _bindings(args.param)
    f = load_germ(args.expr, params, args.shear)
    rows: List[dict] = []
    text: List[str] = []
    if args.polar:
        arcs = escalate(lambda o: polar_arcs(f, o), opts)
        text.append(f"polar arcs of {format_poly(f)}:")
        for a in arcs:
            rows.append(a.to_json())
            text.append(f"  #{a.id} {a.arc}  N={a.arc.N} d_gr={format_rational(a.d_gr)} h0={format_rational(a.h0)}")
    else:
        reps = escalate(lambda o: puiseux_roots(f, Fraction(2), o), opts)
        text.append(f"Puiseux roots of {format_poly(f)}:")
        for rep in reps:
            for arc in conjugates(rep, opts.prec):
                obj = arc.to_json()
                obj.update(conj_class=arc.conj_class, conj_index=arc.conj_index)
                rows.append(obj)
                mult = f" mult={arc.multiplicity}" if arc.multiplicity > 1 else ""
                text.append(f"  [class {arc.conj_class}.{arc.conj_index}] {arc}  N={arc.N}{mult}")
    out = {
        "input": {"expr": args.expr, "params": {k: scalar_to_json(v) for k, v in params.items()}, "shear": args.shear},
        "options": _options_json(opts),
        "analysis": {"kind": "polar" if args.polar else "roots", "arcs": rows},
    }
    _emit(out, args.json, "\n".join(text))
    return EXIT_OK


# ---------------------------------------------------------------------------
# selftest
# ---------------------------------------------------------------------------


def cmd_selftest(args) -> int:
    from .oracle import format_selftest, selftest

    opts = options_from_args(args)
    results = selftest(opts, seed=args.seed)
    ok = all(r.passed for r in results)
    obj = {"input": {}, "options": _options_json(opts), "analysis": {"checks": [r.to_json() for r in results], "passed": ok}}
    summary = f"{sum(r.passed for r in results)}/{len(results)} checks passed"
    _emit(obj, args.json, format_selftest(results) + "\n" + summary)
    return EXIT_OK if ok else EXIT_NOT_EQUIVALENT


COMMANDS = {"analyze": cmd_analyze, "compare": cmd_compare, "arcs": cmd_arcs, "selftest": cmd_selftest}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except PrecisionExhausted as exc:
        print(f"error: precision exhausted: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except TruncationCapExceeded as exc:
        print(f"error: truncation cap exceeded: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except PolarInvError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
