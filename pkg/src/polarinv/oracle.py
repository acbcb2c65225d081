"""Independent checks: gradient degree by sampling, resultant order sums,
exact coordinate changes and a seeded family of test germs.

Nothing here reuses the shifted-support computation of the gradient degree;
the sampler substitutes x = A(y) + c*y^q directly and reads off orders.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence

from . import series as S
from .errors import GridTooCoarse, MultipleRoot, PreconditionNotMet, TruncationCapExceeded
from .options import Options
from .polar import PolarArc, polar_arcs
from .polynomial import BivarPoly, mini_regular_check, parse_poly, resultant_x, squarefree_check, upoly_order
from .puiseux import PuiseuxArc, evaluate_along, refine
from .scalars import Exact, Scalar

INF = math.inf


# ---------------------------------------------------------------------------
# Coordinate changes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Scale:
    c: Scalar


@dataclass(frozen=True)
class Shear:
    lam: Scalar


def transform_germ(f: BivarPoly, kind) -> BivarPoly:
    """Scale(c): f(c*x, c*y). Shear(lam): f(x + lam*y, y)."""
    if isinstance(kind, Scale):
        if kind.c.is_zero_exact():
            raise ValueError("scaling constant must be nonzero")
        return f.scale_vars(kind.c, kind.c)
    if isinstance(kind, Shear):
        return f.substitute_x(BivarPoly.x() + BivarPoly.y() * BivarPoly.const(kind.lam))
    raise TypeError(f"unknown transform {kind!r}")


# ---------------------------------------------------------------------------
# Gradient degree by sampling
# ---------------------------------------------------------------------------


def unit_circle_point(rng: random.Random) -> Exact:
    """((1 - t^2) + 2t i) / (1 + t^2) for a random rational t."""
    t = Fraction(rng.randint(-997, 997), rng.randint(1, 499))
    d = 1 + t * t
    return Exact((1 - t * t) / d, 2 * t / d)


def _gradient_ready(f: BivarPoly, arc: PuiseuxArc, opts: Options):
    """Refine until ord f_y(A) lies below the residual; return (v0, arc)."""
    fy = f.diff_y()
    for _ in range(4 * opts.max_terms):
        v0 = S.order(evaluate_along(fy, arc.series()), opts.zero_eps)
        if v0 < arc.residual:
            return v0, arc
        if arc.residual == INF:
            raise MultipleRoot("gradient vanishes identically along the arc")
        arc = refine(arc, 2 * arc.residual, opts)
    raise TruncationCapExceeded("gradient order did not stabilise")


def default_grid(f: BivarPoly, arc: PuiseuxArc, v0) -> List[Fraction]:
    """All multiples of 1/(N * lcm(1..deg_x f)) in [1, v0]."""
    step = Fraction(1, arc.N * math.lcm(*range(1, max(f.deg_x(), 1) + 1)))
    top = max(Fraction(v0), Fraction(1))
    n = int((top - 1) / step)
    return [1 + k * step for k in range(n + 1)] + ([top] if (top - 1) % step else [])


def sampled_order(f: BivarPoly, arc: PuiseuxArc, q: Fraction, trials: int, rng: random.Random, eps):
    """max over trials of ord_y grad f(A + c*y^q), capped at the residual."""
    fx, fy = f.diff_x(), f.diff_y()
    R = arc.residual
    best = -INF
    for _ in range(trials):
        c = unit_circle_point(rng)
        A = S.add(arc.series(), {Fraction(q): c})
        o = min(S.order(evaluate_along(fx, A, R), eps), S.order(evaluate_along(fy, A, R), eps), R)
        best = max(best, o)
    return best


def dgr_sampling(
    f: BivarPoly,
    arc: PuiseuxArc,
    q_grid: Sequence[Fraction] | None = None,
    trials: int = 5,
    seed: int = 0,
    opts: Options | None = None,
) -> Fraction:
    """Smallest grid exponent q at which a generic c*y^q keeps the gradient order."""
    opts = opts or Options()
    v0, arc = _gradient_ready(f, arc, opts)
    grid = sorted(Fraction(q) for q in (q_grid if q_grid is not None else default_grid(f, arc, v0)))
    rng = random.Random(seed)
    orders = [sampled_order(f, arc, q, trials, rng, opts.zero_eps) for q in grid]
    if orders[-1] != v0:
        raise GridTooCoarse(f"largest grid point y^{grid[-1]} still lowers the gradient order")
    for q, o in zip(grid, orders):
        if o == v0:
            return q
    raise GridTooCoarse("no grid point reaches the gradient order")


# ---------------------------------------------------------------------------
# Resultant order sum
# ---------------------------------------------------------------------------


def order_sum(f: BivarPoly, opts: Options | None = None, arcs: List[PolarArc] | None = None):
    """(sum of h0 over polar arcs, ord_y Res_x(f, f_x))."""
    opts = opts or Options()
    if not (mini_regular_check(f) and squarefree_check(f)):
        raise PreconditionNotMet("germ must be mini-regular and squarefree")
    fx = f.diff_x()
    k = f.order()
    lc = fx.x_coeffs()[-1]
    if f.deg_x() != k or any(not c.is_zero_exact() for c in lc[1:]):
        raise PreconditionNotMet("needs deg_x f = mult f and a constant leading x-coefficient of f_x")
    arcs = arcs if arcs is not None else polar_arcs(f, opts)
    total = sum((a.h0 * a.multiplicity for a in arcs), Fraction(0))
    return total, upoly_order(resultant_x(f, fx))


def order_sum_check(f: BivarPoly, opts: Options | None = None) -> bool:
    total, ord_res = order_sum(f, opts)
    return total == ord_res


# ---------------------------------------------------------------------------
# Template family x^3 + a x^2 y^p + b x y^q + c y^r
# ---------------------------------------------------------------------------


def _signed(v: int) -> str:
    return f"- {-v}" if v < 0 else f"+ {v}"


@dataclass(frozen=True)
class TemplateGerm:
    a: int
    b: int
    c: int
    p: int
    q: int
    r: int

    @property
    def text(self) -> str:
        return (
            f"x^3 {_signed(self.a)}*x^2*y^{self.p} {_signed(self.b)}*x*y^{self.q} {_signed(self.c)}*y^{self.r}"
        )

    def poly(self) -> BivarPoly:
        return parse_poly(self.text)


def template_germs(count: int, seed: int = 0, max_r: int = 10) -> List[TemplateGerm]:
    """Seeded germs of the template family with a triple tangent line x = 0.

    Only mini-regular squarefree members are kept.
    """
    rng = random.Random(seed)
    out: List[TemplateGerm] = []
    seen = set()
    nonzero = [v for v in range(-4, 5) if v]
    for _ in range(200 * count):
        if len(out) >= count:
            break
        g = TemplateGerm(
            a=rng.choice(nonzero),
            b=rng.choice(nonzero),
            c=rng.choice(nonzero),
            p=rng.randint(2, 3),
            q=rng.randint(3, 6),
            r=rng.randint(4, max_r),
        )
        if g in seen:
            continue
        seen.add(g)
        f = g.poly()
        if mini_regular_check(f) and squarefree_check(f):
            out.append(g)
    return out


def random_exact_scalar(rng: random.Random, complex_part: bool = True) -> Exact:
    """A small nonzero Gaussian rational."""
    while True:
        re = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
        im = Fraction(rng.randint(-3, 3), rng.randint(1, 3)) if complex_part else Fraction(0)
        if re or im:
            return Exact(re, im)


# ---------------------------------------------------------------------------
# Self-test
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail, "seconds": round(self.seconds, 4)}


CORPUS = (
    ("x^3 - 3*x*y^10 + y^12", "cusp family, t = 1"),
    ("x^3 + x^2*y^3 + y^9 + x*y^7", "two-parameter family, b = c = 1"),
    ("x^3 - 3*x*y^4 + y^6", "degenerate family, t = 1"),
    ("x^2 - y^3", "ordinary cusp"),
    ("x^2 + x*y + y^5", "smooth tangent cone"),
    ("x^3 - y^7 + x*y^5", "ramified polar arcs"),
)


def _timed(name: str, fn) -> CheckResult:
    t = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed check, reported with its type
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(name, bool(ok), detail, time.perf_counter() - t)


def _show(items) -> str:
    return "[" + ", ".join("(" + ", ".join(str(v) for v in t) + ")" if isinstance(t, tuple) else str(t) for t in items) + "]"


def _golden_cusp(opts: Options):
    from .invariant import inv2

    I = inv2(parse_poly("x^3 - 3*x*y^10 + y^12"), opts)
    (d,) = I.packets
    lead = sorted((e.h0, e.a0) for e in d.leading)
    pairs = sorted((p.l0, p.m, p.nu.re) for p in d.pairs)
    want_pairs = [(12, 15, Fraction(-4)), (12, 15, Fraction(4))]
    ok = lead == [(12, Exact(1)), (12, Exact(1))] and pairs == want_pairs
    return ok, f"leading {_show(lead)}, pairs {_show(pairs)}"


def _golden_two_param(opts: Options):
    from .invariant import inv2

    I = inv2(parse_poly("x^3 + x^2*y^3 + y^9 + x*y^7"), opts)
    (d,) = I.packets
    a0s = sorted(e.a0.re for e in d.leading)
    nus = sorted(p.nu.re for p in d.pairs)
    dgr = sorted({a.d_gr for a in I.arcs})
    ok = a0s == [1, Fraction(31, 27)] and nus == [Fraction(-18, 31), Fraction(18, 31)] and dgr == [5]
    return ok, f"a0 {_show(a0s)}, nu {_show(nus)}, d_gr {_show(dgr)}"


def _golden_degenerate(opts: Options):
    from .invariant import inv2

    I = inv2(parse_poly("x^3 - 3*x*y^4 + y^6"), opts)
    (d,) = I.packets
    lead = sorted((e.h0, e.a0.re) for e in d.leading)
    return lead == [(6, -1), (6, 3)] and not d.pairs, f"leading {_show(lead)}, {len(d.pairs)} pairs"


def _oracle_dgr(text: str, opts: Options, seed: int):
    f = parse_poly(text)
    rows = []
    ok = True
    for a in polar_arcs(f, opts):
        if a.arc.conj_index:
            continue
        s = dgr_sampling(f, a.arc, seed=seed, opts=opts)
        rows.append(f"{a.arc.conj_class}: support {a.d_gr}, sampling {s}")
        ok &= s == a.d_gr
    return ok, "; ".join(rows)


def _oracle_cusp_report(opts: Options, seed: int):
    f = parse_poly("x^3 - 3*x*y^10 + y^12")
    arcs = [a for a in polar_arcs(f, opts) if not a.arc.conj_index]
    rep = arcs[0]
    s = dgr_sampling(f, rep.arc, seed=seed, opts=opts)
    detail = f"support {rep.d_gr}, sampling {s}, quoted value 11/2"
    return s == rep.d_gr, detail


def _order_sum(text: str, opts: Options):
    total, ord_res = order_sum(parse_poly(text), opts)
    return total == ord_res, f"sum h0 = {total}, ord Res = {ord_res}"


def _comparison(a: str, b: str, expect_consistent: bool, opts: Options):
    from .equivalence import Decision, format_report, inv2_equivalent
    from .invariant import inv2

    r = inv2_equivalent(inv2(parse_poly(a), opts), inv2(parse_poly(b), opts))
    ok = (r.decision is Decision.CONSISTENT) == expect_consistent
    return ok, format_report(r).replace("\n", " | ")


def selftest(opts: Options | None = None, seed: int = 0) -> List[CheckResult]:
    """Golden values, oracle agreement and comparison certificates."""
    opts = opts or Options()
    checks = [
        ("golden: cusp family t=1", lambda: _golden_cusp(opts)),
        ("golden: two-parameter family b=c=1", lambda: _golden_two_param(opts)),
        ("golden: degenerate family t=1", lambda: _golden_degenerate(opts)),
        ("gradient degree: cusp family arc", lambda: _oracle_cusp_report(opts, seed)),
    ]
    for text, label in CORPUS:
        checks.append((f"gradient degree: {label}", lambda t=text: _oracle_dgr(t, opts, seed)))
    for text, label in CORPUS[:4]:
        checks.append((f"order sum: {label}", lambda t=text: _order_sum(t, opts)))
    checks += [
        (
            "compare: cusp family t=1 vs t=2",
            lambda: _comparison("x^3 - 3*x*y^10 + y^12", "x^3 - 12*x*y^10 + y^12", False, opts),
        ),
        (
            "compare: two-parameter family (1,1) vs (2,1)",
            lambda: _comparison("x^3 + x^2*y^3 + y^9 + x*y^7", "x^3 + 2*x^2*y^3 + y^9 + x*y^7", False, opts),
        ),
        (
            "compare: cusp family vs its rescaling by 2",
            lambda: _comparison(
                "x^3 - 3*x*y^10 + y^12", str(transform_germ(parse_poly("x^3 - 3*x*y^10 + y^12"), Scale(Exact(2)))), True, opts
            ),
        ),
    ]
    return [_timed(name, fn) for name, fn in checks]


def format_selftest(results: Iterable[CheckResult]) -> str:
    lines = []
    for r in results:
        lines.append(f"{'PASS' if r.passed else 'FAIL'}  {r.name}  [{r.detail}]  ({r.seconds:.3f}s)")
    return "\n".join(lines)


__all__ = [
    "Scale",
    "Shear",
    "transform_germ",
    "unit_circle_point",
    "default_grid",
    "dgr_sampling",
    "order_sum",
    "order_sum_check",
    "TemplateGerm",
    "template_germs",
    "random_exact_scalar",
    "CheckResult",
    "CORPUS",
    "selftest",
    "format_selftest",
]
