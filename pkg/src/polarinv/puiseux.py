"""Newton polygons and Newton-Puiseux expansion of the roots x = alpha(y).

Roots are found by the classical polygon recursion while a root cluster is
still multiple; a separated (simple) root is then extended by Newton lifting
on series, which roughly doubles the certified order per step. Every arc
carries a residual order R: the true root differs from the stored
truncation by O(y^R). R is read off the Newton polygon of
``F(A(y) + z, y)``, so it is exact rather than estimated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import comb, gcd
from typing import Callable, Dict, List, Sequence, Tuple

from . import series as S
from .errors import PrecisionError, TruncationCapExceeded
from .options import Options
from .polynomial import BivarPoly, resultant_x
from .scalars import (
    ZERO,
    Exact,
    Scalar,
    ZeroTest,
    format_rational,
    nth_root,
    parse_rational,
    root_of_unity,
    scalar_from_json,
    scalar_to_json,
    sort_key,
    univariate_roots,
    zero_test,
)

INF = math.inf

# shifted polynomial G(z, y) = sum_i G[i](y) z^i
Shifted = Dict[int, S.Series]


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Edge:
    slope: Fraction  # the root order s: terms z ~ c*y^s
    start: Tuple[int, Fraction]
    end: Tuple[int, Fraction]
    poly: tuple  # ascending coefficients of c^(i - start_i) along the edge

    @property
    def length(self) -> int:
        return self.end[0] - self.start[0]


@dataclass(frozen=True)
class NewtonPolygon:
    support: frozenset
    hull: tuple  # vertices, increasing i
    edges: tuple


@dataclass(frozen=True)
class PuiseuxArc:
    """x = sum c_k y^(e_k) + O(y^residual)."""

    N: int
    terms: tuple  # ((Fraction exp, Scalar coeff), ...)
    residual: object  # Fraction or math.inf
    multiplicity: int = 1
    conj_class: int = 0
    conj_index: int = 0
    source: BivarPoly | None = field(default=None, compare=False, repr=False)

    @property
    def is_exact_root(self) -> bool:
        return self.residual == INF

    @property
    def order(self):
        """Leading exponent (inf for the zero arc)."""
        return self.terms[0][0] if self.terms else INF

    @property
    def last_exponent(self) -> Fraction:
        return self.terms[-1][0] if self.terms else Fraction(0)

    def series(self) -> S.Series:
        return {e: c for e, c in self.terms}

    def coeff(self, e) -> Scalar:
        for ex, c in self.terms:
            if ex == e:
                return c
        return ZERO

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "terms": [{"exp": format_rational(e), "coeff": scalar_to_json(c)} for e, c in self.terms],
            "residual": format_rational(self.residual),
            "mult": self.multiplicity,
        }

    @classmethod
    def from_json(cls, obj) -> "PuiseuxArc":
        return cls(
            N=int(obj["N"]),
            terms=tuple((Fraction(t["exp"]), scalar_from_json(t["coeff"])) for t in obj["terms"]),
            residual=parse_rational(obj["residual"]),
            multiplicity=int(obj.get("mult", 1)),
        )

    def __str__(self):
        return format_arc(self)


def format_arc(arc: PuiseuxArc) -> str:
    if not arc.terms:
        body = "0"
    else:
        parts = []
        for e, c in arc.terms:
            mono = "y" if e == 1 else f"y^{e}" if e.denominator == 1 else f"y^({e})"
            parts.append(f"({c})*{mono}")
        body = " + ".join(parts)
    tail = "" if arc.residual == INF else f" + O(y^{format_rational(arc.residual)})"
    return f"x = {body}{tail}"


@dataclass(frozen=True)
class IndistinguishableAt:
    """Two arcs agree on every certified term below ``bound``."""

    bound: object

    def __ge__(self, other):
        return self.bound >= other

    def __str__(self):
        return f"indistinguishable below y^{format_rational(self.bound)}"


@dataclass(frozen=True)
class GermExpansion:
    terms: tuple  # ((Fraction exp, Scalar coeff), ...) strictly increasing
    window: object  # coefficients certified for exponents < window

    @property
    def leading(self):
        return self.terms[0] if self.terms else None

    def coeff(self, e) -> Scalar:
        if e >= self.window:
            raise ValueError(f"y^{e} lies outside the certified window y^{self.window}")
        for ex, c in self.terms:
            if ex == e:
                return c
        return ZERO

    def to_json(self):
        return {
            "terms": [{"exp": format_rational(e), "coeff": scalar_to_json(c)} for e, c in self.terms],
            "window": format_rational(self.window),
        }


# ---------------------------------------------------------------------------
# Shifting and polygons
# ---------------------------------------------------------------------------


def _poly_columns(F: BivarPoly) -> Dict[int, S.Series]:
    cols: Dict[int, S.Series] = {}
    for (i, j), c in F.items():
        cols.setdefault(i, {})[Fraction(j)] = c
    return cols


def shift(F: BivarPoly, arc_series: S.Series, upto=INF) -> Shifted:
    """G(z, y) = F(A(y) + z, y) for the (finite) series A."""
    cols = _poly_columns(F)
    n = max(cols) if cols else 0
    powers = [{Fraction(0): Exact(1)}]
    for _ in range(n):
        powers.append(S.mul(powers[-1], arc_series, upto))
    G: Shifted = {}
    for i, fi in cols.items():
        for l in range(i + 1):
            term = S.mul(fi, powers[i - l], upto)
            if not term:
                continue
            b = comb(i, l)
            if b != 1:
                term = {e: c * b for e, c in term.items()}
            G[l] = S.add(G[l], term) if l in G else term
    return G


def _as_shifted(F) -> Shifted:
    if isinstance(F, BivarPoly):
        return _poly_columns(F)
    return F


def newton_polygon(F, eps=None) -> NewtonPolygon:
    """Lower-left Newton polygon of F(z, y) (z-degree i, y-exponent j).

    Only edges of negative slope in the (i, j) plane are kept; an edge's
    ``slope`` field is the corresponding positive root order s.
    """
    G = _as_shifted(F)
    coeffs: Dict[Tuple[int, Fraction], Scalar] = {}
    for i, col in G.items():
        for e, c in S.clean(col, eps).items():
            coeffs[(i, Fraction(e))] = c
    if not coeffs:
        raise ValueError("newton_polygon of the zero polynomial")
    support = frozenset(coeffs)
    colmin: Dict[int, Fraction] = {}
    for i, j in support:
        if i not in colmin or j < colmin[i]:
            colmin[i] = j
    pts = sorted(colmin.items())
    lower: List[Tuple[int, Fraction]] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    # keep the descending part: up to the first vertex of minimal j
    jmin = min(j for _, j in lower)
    hull = []
    for v in lower:
        hull.append(v)
        if v[1] == jmin:
            break
    edges = []
    for a, b in zip(hull, hull[1:]):
        s = Fraction(a[1] - b[1]) / (b[0] - a[0])
        level = a[1] + s * a[0]
        poly = []
        for i in range(a[0], b[0] + 1):
            j = level - s * i
            poly.append(coeffs.get((i, j), ZERO))
        edges.append(Edge(slope=s, start=a, end=b, poly=tuple(poly)))
    return NewtonPolygon(support=support, hull=tuple(hull), edges=tuple(edges))


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


# ---------------------------------------------------------------------------
# Square-free splitting of the input in x
# ---------------------------------------------------------------------------


def squarefree_factors_x(F: BivarPoly) -> List[Tuple[BivarPoly, int]]:
    """Split F into square-free factors of positive x-degree with multiplicities."""
    if F.deg_x() < 1:
        return []
    Fx = F.diff_x()
    if Fx.deg_x() < 1 or any(not c.is_zero_exact() for c in resultant_x(F, Fx)):
        return [(F, 1)]
    return _sympy_sqf(F)


def _sympy_sqf(F: BivarPoly) -> List[Tuple[BivarPoly, int]]:
    import sympy

    x, y = sympy.symbols("x y")
    expr = 0
    for (i, j), c in F.items():
        expr += (sympy.Rational(c.re.numerator, c.re.denominator)
                 + sympy.I * sympy.Rational(c.im.numerator, c.im.denominator)) * x ** i * y ** j
    P = sympy.Poly(expr, x, y, domain="QQ_I")
    _, factors = P.sqf_list()
    out = []
    for fac, k in factors:
        terms = {}
        for (i, j), c in fac.as_dict().items():
            re, im = sympy.sympify(c).as_real_imag()
            terms[(i, j)] = Exact(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))
        P_k = BivarPoly(terms)
        if P_k.deg_x() >= 1:
            out.append((P_k, k))
    return out


# ---------------------------------------------------------------------------
# Newton-Puiseux
# ---------------------------------------------------------------------------


def _column_orders(G: Shifted, eps) -> Dict[int, Fraction]:
    out = {}
    for i, col in G.items():
        o = S.order(col, eps)
        if o != INF:
            out[i] = o
    return out


def _check_caps(terms, opts: Options):
    if len(terms) > opts.max_terms:
        raise TruncationCapExceeded(f"arc needs more than {opts.max_terms} terms")


def lift(P: BivarPoly, terms: Sequence, target, opts: Options) -> Tuple[tuple, object]:
    """Extend a separated root of P until its residual order reaches ``target``.

    Returns ``(terms, residual)``. The residual is the exact order of the
    remaining correction, read off the polygon of P(A + z, y).
    """
    eps = opts.zero_eps
    terms = list(terms)
    e_last = terms[-1][0] if terms else Fraction(0)
    while True:
        A = {e: c for e, c in terms}
        G = shift(P, A)
        cols = _column_orders(G, eps)
        if 0 not in cols:
            return tuple(terms), INF
        j0 = cols[0]
        cands = {i: (j0 - j) / i for i, j in cols.items() if i >= 1}
        if 1 not in cands:
            raise PrecisionError("separated root lost its linear term")
        s = max(cands.values())
        if cands[1] != s or sum(1 for v in cands.values() if v == s) != 1 or s <= e_last:
            raise PrecisionError("root is not separated at this precision")
        if s >= target:
            return tuple(terms), s
        j1 = cols[1]
        B = min((j + i * s for i, j in cols.items() if i >= 2), default=INF) - j1
        upto = min(B, Fraction(target) if target != INF else B)
        if upto == INF:
            upto = s + 1
        delta = S.divide(G[0], G[1], upto, eps)
        new = [(e, -c) for e, c in S.sorted_terms(S.clean(delta, eps))]
        if not new:
            raise PrecisionError("Newton step produced no correction")
        terms.extend(new)
        e_last = terms[-1][0]
        _check_caps(terms, opts)


def _ramification(s: Fraction, N: int) -> int:
    return (s * N).denominator


def _expand(P: BivarPoly, target, opts: Options) -> List[PuiseuxArc]:
    eps = opts.zero_eps
    out: List[PuiseuxArc] = []
    # state: (terms, N, cluster size or None at the root, order bound)
    stack = [((), 1, None, Fraction(0))]
    while stack:
        terms, N, m, e_last = stack.pop()
        A = {e: c for e, c in terms}
        G = shift(P, A)
        cols = _column_orders(G, eps)
        i_min = min(cols)
        if i_min >= 1:
            out.append(PuiseuxArc(N=N, terms=terms, residual=INF, multiplicity=i_min, source=P))
        poly = newton_polygon(G, eps)
        edges = [e for e in poly.edges if e.slope > e_last]
        if m is not None and sum(e.length for e in edges) + (i_min if i_min else 0) != m:
            raise PrecisionError("root count mismatch inside a cluster")
        for edge in edges:
            s = edge.slope
            q = _ramification(s, N)
            psi = list(edge.poly[::q])
            for xi, mu in univariate_roots(psi, opts.prec, eps):
                if zero_test(xi, eps) is not ZeroTest.NONZERO:
                    continue
                c = nth_root(xi, q, opts.prec)
                child = terms + ((s, c),)
                _check_caps(child, opts)
                if mu == 1:
                    lt, R = lift(P, child, target, opts)
                    out.append(PuiseuxArc(N=N * q, terms=lt, residual=R, source=P))
                else:
                    stack.append((child, N * q, mu, s))
    return out


def arc_sort_key(arc: PuiseuxArc):
    key = [arc.order if arc.terms else INF]
    for e, c in arc.terms:
        key.append((e, sort_key(c)))
    return tuple(key)


def puiseux_roots(F: BivarPoly, target=Fraction(2), opts: Options | None = None) -> List[PuiseuxArc]:
    """All Puiseux roots x = alpha(y) of F with positive order.

    One representative per conjugacy class, each expanded until its
    residual order reaches ``target``; multiplicities come from the
    square-free splitting of F.
    """
    opts = opts or Options()
    arcs: List[PuiseuxArc] = []
    for P, k in squarefree_factors_x(F):
        for arc in _expand(P, target, opts):
            arcs.append(replace(arc, multiplicity=arc.multiplicity * k))
    arcs.sort(key=arc_sort_key)
    return [replace(a, conj_class=n) for n, a in enumerate(arcs)]


def refine(arc: PuiseuxArc, target, opts: Options | None = None) -> PuiseuxArc:
    """Extend ``arc`` so that its residual order is at least ``target``."""
    opts = opts or Options()
    if arc.residual >= target:
        return arc
    if arc.source is None:
        raise ValueError("arc carries no source polynomial to refine against")
    terms, R = lift(arc.source, arc.terms, target, opts)
    return replace(arc, terms=terms, residual=R)


def conjugates(arc: PuiseuxArc, prec: int | None = None) -> List[PuiseuxArc]:
    """The N conjugates: coefficient of y^(n/N) times theta^(j*n)."""
    prec = prec or Options().prec
    out = []
    for j in range(arc.N):
        terms = tuple((e, c * root_of_unity(j * int(e * arc.N), arc.N, prec)) for e, c in arc.terms)
        out.append(replace(arc, terms=terms, conj_index=j))
    return out


def contact_order(a: PuiseuxArc, b: PuiseuxArc, eps=None):
    """ord_y(a - b), or IndistinguishableAt(min residual)."""
    bound = min(a.residual, b.residual)
    sa, sb = a.series(), b.series()
    for e in sorted(set(sa) | set(sb)):
        if e >= bound:
            break
        d = sa.get(e, ZERO) - sb.get(e, ZERO)
        t = zero_test(d, eps)
        if t is ZeroTest.UNKNOWN:
            from .errors import AmbiguousZeroTest

            raise AmbiguousZeroTest(f"cannot compare arcs at y^{e}")
        if t is ZeroTest.NONZERO:
            return e
    return IndistinguishableAt(bound)


def contact_order_starred(a: PuiseuxArc, b: PuiseuxArc, eps=None, prec=None):
    """Maximum plain contact order over all conjugate pairs."""
    best = None
    for ca in conjugates(a, prec):
        for cb in conjugates(b, prec):
            v = contact_order(ca, cb, eps)
            if isinstance(v, IndistinguishableAt):
                return v
            if best is None or v > best:
                best = v
    return best


def _check_ramification(arc: PuiseuxArc) -> bool:
    g = arc.N
    for e, _ in arc.terms:
        g = gcd(g, int(e * arc.N))
    return g == 1


# ---------------------------------------------------------------------------
# Composition f(alpha(y), y)
# ---------------------------------------------------------------------------


def evaluate_along(f: BivarPoly, arc_series: S.Series, upto=INF) -> S.Series:
    """f(A(y), y) for a finite series A (exact for the truncation)."""
    G = shift(f, arc_series, upto)
    return G.get(0, {})


def _derivative_orders(f: BivarPoly, A: S.Series, eps) -> List[Tuple[int, object]]:
    """[(d, ord_y (d/dx)^d f (A(y), y))] for d >= 1."""
    out = []
    g = f
    for d in range(1, f.deg_x() + 1):
        g = g.diff_x()
        if g.is_zero():
            break
        out.append((d, S.order(evaluate_along(g, A), eps)))
    return out


def compose_germ_refining(
    f: BivarPoly,
    arc: PuiseuxArc,
    window,
    opts: Options | None = None,
    refine_fn: Callable[[PuiseuxArc, object], PuiseuxArc] | None = None,
) -> Tuple[GermExpansion, PuiseuxArc]:
    """Expansion of f(alpha(y), y) certified below ``window``.

    The truncation error is bounded by
    ``min_d (ord (d/dx)^d f(A) + d*R)``; the arc is refined until that bound
    reaches the requested window.
    """
    opts = opts or Options()
    eps = opts.zero_eps
    cap = opts.window_factor * max(f.total_degree(), 1)
    if window != INF and window > cap:
        raise TruncationCapExceeded(f"window y^{window} exceeds the cap y^{cap}")
    refine_fn = refine_fn or (lambda a, t: refine(a, t, opts))
    for _ in range(4 * opts.max_terms):
        A = arc.series()
        if arc.residual == INF:
            certified = INF
        else:
            certified = min(
                (o + d * arc.residual for d, o in _derivative_orders(f, A, eps)),
                default=INF,
            )
        if certified >= window:
            upto = certified if certified != INF else window
            vals = S.clean(S.truncate(evaluate_along(f, A, upto), upto), eps)
            return GermExpansion(terms=tuple(S.sorted_terms(vals)), window=upto), arc
        gap = window - certified
        arc = refine_fn(arc, arc.residual + max(gap, Fraction(1, arc.N)))
    raise TruncationCapExceeded("could not certify the requested window")


def compose_germ(f: BivarPoly, arc: PuiseuxArc, window, opts: Options | None = None) -> GermExpansion:
    return compose_germ_refining(f, arc, window, opts)[0]
