"""Polar arcs, gradient degrees, tangency and gradient canyons."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import List

from . import series as S
from .errors import IndistinguishableArcs, MultipleRoot, NotMiniRegular, TruncationCapExceeded
from .options import Options
from .polynomial import BivarPoly, TangentCone, mini_regular_check, squarefree_check, tangent_cone
from .puiseux import (
    GermExpansion,
    IndistinguishableAt,
    PuiseuxArc,
    compose_germ_refining,
    conjugates,
    contact_order_starred,
    evaluate_along,
    puiseux_roots,
    refine,
    shift,
)
from .scalars import ZERO, Scalar, format_rational, root_of_unity, scalar_to_json, scalars_equal

INF = math.inf


@dataclass(frozen=True)
class PolarArc:
    id: int
    arc: PuiseuxArc
    d_gr: object  # Fraction or inf
    tangent_lambda: Scalar
    is_tangential: bool
    h0: Fraction
    a0: Scalar
    expansion: GermExpansion
    canyon: int = -1

    @property
    def multiplicity(self) -> int:
        return self.arc.multiplicity

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "arc": self.arc.to_json(),
            "conj_class": self.arc.conj_class,
            "conj_index": self.arc.conj_index,
            "d_gr": format_rational(self.d_gr),
            "tangent_lambda": scalar_to_json(self.tangent_lambda),
            "tangential": self.is_tangential,
            "h0": format_rational(self.h0),
            "a0": scalar_to_json(self.a0),
            "expansion": self.expansion.to_json(),
            "canyon": self.canyon,
        }


@dataclass(frozen=True)
class Canyon:
    id: int
    members: frozenset
    degree: object


# ---------------------------------------------------------------------------
# Gradient degree
# ---------------------------------------------------------------------------


def _refine_for_gradient(f: BivarPoly, arc: PuiseuxArc, opts: Options):
    """Refine until ord f_y(A) < R so that every order below it is exact."""
    fy = f.diff_y()
    eps = opts.zero_eps
    for _ in range(4 * opts.max_terms):
        v0 = S.order(evaluate_along(fy, arc.series()), eps)
        if v0 == INF and arc.is_exact_root:
            raise MultipleRoot("f vanishes identically along a polar arc (repeated branch)")
        if v0 < arc.residual:
            return v0, arc
        arc = refine(arc, max(arc.residual * 2, v0 + 1) if v0 != INF else arc.residual * 2, opts)
    raise TruncationCapExceeded("gradient order did not stabilise")


def _shifted_support_dgr(f: BivarPoly, arc: PuiseuxArc, v0, eps) -> Fraction:
    A = arc.series()
    best = Fraction(1)
    for g in (f.diff_x(), f.diff_y()):
        for i, col in shift(g, A).items():
            if i < 1:
                continue
            j = S.order(col, eps)
            if j == INF or j >= v0:
                continue
            best = max(best, (v0 - j) / i)
    return best


def gradient_degree_refining(f: BivarPoly, arc: PuiseuxArc, opts: Options | None = None):
    """(d_gr, v0, refined arc) by the shifted-support method.

    With G1 = f_x(A + z, y), G2 = f_y(A + z, y) and v0 = ord f_y(A), the
    gradient order stays v0 after x -> A + c*y^q exactly when every support
    point (i >= 1, j) of G1 or G2 has j + q*i >= v0. The coefficient at the
    minimum is a nonzero polynomial in c, so a generic c sees no cancellation.
    """
    opts = opts or Options()
    v0, arc = _refine_for_gradient(f, arc, opts)
    return _shifted_support_dgr(f, arc, v0, opts.zero_eps), v0, arc


def gradient_degree(f: BivarPoly, arc: PuiseuxArc, opts: Options | None = None) -> Fraction:
    return gradient_degree_refining(f, arc, opts)[0]


# ---------------------------------------------------------------------------
# Tangency
# ---------------------------------------------------------------------------


def tangency(arc: PuiseuxArc, cone: TangentCone, eps=None):
    """(lambda, tangential?) for the tangent line x = lambda*y of the arc."""
    lam = arc.terms[0][1] if arc.terms and arc.terms[0][0] == 1 else ZERO
    hit = any(scalars_equal(lam, line, eps) for line, _ in cone.sigma_lines)
    return lam, hit


# ---------------------------------------------------------------------------
# Polar arcs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _ClassData:
    arc: PuiseuxArc
    d_gr: Fraction
    h0: Fraction
    expansion: GermExpansion


def _decorate_class(f: BivarPoly, rep: PuiseuxArc, opts: Options) -> _ClassData:
    d, v0, rep = gradient_degree_refining(f, rep, opts)
    h0 = v0 + 1  # d/dy f(alpha(y), y) = f_y(alpha(y), y) along a polar arc
    exp, rep = compose_germ_refining(f, rep, max(h0 + d - 1, h0 + 1), opts)
    if not exp.terms:
        raise MultipleRoot("f vanishes identically along a polar arc (repeated branch)")
    if exp.terms[0][0] != h0:
        raise AssertionError(f"leading exponent {exp.terms[0][0]} disagrees with ord f_y + 1 = {h0}")
    return _ClassData(arc=rep, d_gr=d, h0=h0, expansion=exp)


def _twist_expansion(exp: GermExpansion, j: int, N: int, prec: int) -> GermExpansion:
    if j == 0:
        return exp
    terms = tuple((e, c * root_of_unity(j * int(e * N), N, prec)) for e, c in exp.terms)
    return GermExpansion(terms=terms, window=exp.window)


def pmap(fn, items, threads: int):
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def check_admissible(f: BivarPoly):
    if not mini_regular_check(f):
        raise NotMiniRegular("germ is not mini-regular in x (H_k(1,0) = 0)")
    if not squarefree_check(f):
        raise MultipleRoot("germ has a multiple root (Res_x(f, f_x) vanishes)")


def polar_arcs(f: BivarPoly, opts: Options | None = None, cone: TangentCone | None = None) -> List[PolarArc]:
    """All polar arcs through the origin, conjugates listed individually."""
    opts = opts or Options()
    check_admissible(f)
    cone = cone or tangent_cone(f, opts.prec)
    reps = puiseux_roots(f.diff_x(), Fraction(2), opts)
    classes = pmap(lambda r: _decorate_class(f, r, opts), reps, opts.threads)
    out: List[PolarArc] = []
    for cd in classes:
        rep = cd.arc
        a0_rep = cd.expansion.terms[0][1]
        for conj in conjugates(rep, opts.prec):
            exp = _twist_expansion(cd.expansion, conj.conj_index, rep.N, opts.prec)
            lam, tang = tangency(conj, cone, opts.zero_eps)
            out.append(
                PolarArc(
                    id=len(out),
                    arc=conj,
                    d_gr=cd.d_gr,
                    tangent_lambda=lam,
                    is_tangential=tang,
                    h0=cd.h0,
                    a0=exp.terms[0][1] if conj.conj_index else a0_rep,
                    expansion=exp,
                )
            )
    parts = canyons(out, opts)
    where = {m: c.id for c in parts for m in c.members}
    return [replace(p, canyon=where[p.id]) for p in out]


# ---------------------------------------------------------------------------
# Canyons
# ---------------------------------------------------------------------------


def _same_canyon(a: PolarArc, b: PolarArc, opts: Options) -> bool:
    if a.d_gr != b.d_gr:
        return False
    if a.arc.conj_class == b.arc.conj_class and a.arc.source is b.arc.source:
        return True
    v = contact_order_starred(a.arc, b.arc, opts.zero_eps, opts.prec)
    if isinstance(v, IndistinguishableAt):
        if v.bound >= a.d_gr:
            return True
        raise IndistinguishableArcs(f"arcs {a.id} and {b.id} need longer truncations")
    return v >= a.d_gr


def canyons(arcs: List[PolarArc], opts: Options | None = None) -> List[Canyon]:
    """Partition arcs: same canyon iff equal d_gr and starred contact >= d_gr."""
    opts = opts or Options()
    groups: List[List[PolarArc]] = []
    for a in arcs:
        home = None
        for g in groups:
            if _same_canyon(a, g[0], opts):
                home = g
                break
        if home is None:
            groups.append([a])
            continue
        for b in home[1:]:
            if not _same_canyon(a, b, opts):
                raise AssertionError("canyon relation is not transitive; contact orders are inconsistent")
        home.append(a)
    return [Canyon(id=k, members=frozenset(p.id for p in g), degree=g[0].d_gr) for k, g in enumerate(groups)]
