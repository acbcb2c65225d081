"""Pair data (m, nu), per-line packets and the full invariant of a germ.

A packet collects, for one singular tangent line x = lambda*y, the leading
data (h0, a0) of f along every polar arc tangent to it, plus the pair data
of every ordered pair of such arcs that lie in different canyons, share h0
and whose normalized expansions split before h0 + delta - 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import List, Tuple

from .options import Options, escalate
from .polar import PolarArc, check_admissible, pmap, polar_arcs
from .polynomial import BivarPoly, tangent_cone
from .puiseux import (
    GermExpansion,
    IndistinguishableAt,
    compose_germ_refining,
    contact_order,
    refine,
)
from .scalars import (
    ONE,
    Exact,
    Scalar,
    ZeroTest,
    format_rational,
    format_scalar,
    nth_root,
    scalar_from_json,
    scalar_to_json,
    scalars_equal,
    sort_key,
    zero_test,
)
from .errors import AmbiguousZeroTest, IndistinguishableArcs

INF = math.inf


class Exclusion(enum.Enum):
    CONTACT_ONE = "ContactOrderOne"
    SAME_CANYON = "SameCanyon"
    DIFFERENT_H0 = "DifferentLeadingExponent"
    NO_DIFFERENCE = "NoDifferenceInWindow"


@dataclass(frozen=True)
class Excluded:
    reason: Exclusion


@dataclass(frozen=True)
class PairData:
    alpha: int
    beta: int
    l0: Fraction
    delta: Fraction
    m: Fraction
    nu: Scalar

    def to_json(self) -> dict:
        return {
            "l0": format_rational(self.l0),
            "m": format_rational(self.m),
            "nu": scalar_to_json(self.nu),
            "alpha": self.alpha,
            "beta": self.beta,
            "delta": format_rational(self.delta),
        }

    @classmethod
    def from_json(cls, obj) -> "PairData":
        return cls(
            alpha=int(obj["alpha"]),
            beta=int(obj["beta"]),
            l0=Fraction(obj["l0"]),
            delta=Fraction(obj.get("delta", "0")),
            m=Fraction(obj["m"]),
            nu=scalar_from_json(obj["nu"]),
        )


@dataclass(frozen=True)
class Leading:
    h0: Fraction
    a0: Scalar
    mult: int = 1

    def to_json(self) -> dict:
        return {"h0": format_rational(self.h0), "a0": scalar_to_json(self.a0), "mult": self.mult}

    @classmethod
    def from_json(cls, obj) -> "Leading":
        return cls(h0=Fraction(obj["h0"]), a0=scalar_from_json(obj["a0"]), mult=int(obj.get("mult", 1)))


@dataclass(frozen=True)
class DeltaL:
    lam: Scalar
    leading: Tuple[Leading, ...]
    pairs: Tuple[PairData, ...]

    def to_json(self) -> dict:
        return {
            "lambda": scalar_to_json(self.lam),
            "leading": [e.to_json() for e in self.leading],
            "pairs": [p.to_json() for p in self.pairs],
        }

    @classmethod
    def from_json(cls, obj) -> "DeltaL":
        return cls(
            lam=scalar_from_json(obj["lambda"]),
            leading=tuple(Leading.from_json(e) for e in obj["leading"]),
            pairs=tuple(PairData.from_json(p) for p in obj["pairs"]),
        )


@dataclass(frozen=True)
class Inv2:
    packets: Tuple[DeltaL, ...]
    k: int
    options: Options = field(default_factory=Options, compare=False)
    arcs: Tuple[PolarArc, ...] = field(default=(), compare=False, repr=False)

    def to_json(self) -> dict:
        return {"lines": [d.to_json() for d in self.packets], "k": self.k}

    @classmethod
    def from_json(cls, obj) -> "Inv2":
        return cls(packets=tuple(DeltaL.from_json(d) for d in obj["lines"]), k=int(obj["k"]))


# ---------------------------------------------------------------------------
# Pair data
# ---------------------------------------------------------------------------


def _plain_contact(A: PolarArc, B: PolarArc, opts: Options):
    """Contact order of the two specific conjugates, refining if needed."""
    a, b = A.arc, B.arc
    for _ in range(opts.max_terms):
        v = contact_order(a, b, opts.zero_eps)
        if not isinstance(v, IndistinguishableAt):
            return v
        target = 2 * max(v.bound, Fraction(1))
        a, b = refine(a, target, opts), refine(b, target, opts)
    raise IndistinguishableArcs(f"arcs {A.id} and {B.id} agree on every computed term")


def _expansion_upto(f: BivarPoly, P: PolarArc, window, opts: Options) -> GermExpansion:
    if P.expansion.window >= window:
        return P.expansion
    exp, _ = compose_germ_refining(f, P.arc, window, opts)
    return exp


def pair_data(f: BivarPoly, A: PolarArc, B: PolarArc, opts: Options | None = None):
    """PairData for the ordered pair (A, B) or Excluded(reason)."""
    opts = opts or Options()
    eps = opts.zero_eps
    if A.canyon == B.canyon:
        return Excluded(Exclusion.SAME_CANYON)
    if A.h0 != B.h0:
        return Excluded(Exclusion.DIFFERENT_H0)
    delta = _plain_contact(A, B, opts)
    if delta <= 1:
        return Excluded(Exclusion.CONTACT_ONE)
    l0 = A.h0
    window = l0 + delta - 1
    ea = _expansion_upto(f, A, window, opts)
    eb = _expansion_upto(f, B, window, opts)
    a0, b0 = ea.coeff(l0), eb.coeff(l0)
    exps = sorted({e for e, _ in ea.terms + eb.terms if l0 < e < window})
    for e in exps:
        diff = ea.coeff(e) / a0 - eb.coeff(e) / b0
        t = zero_test(diff, eps)
        if t is ZeroTest.UNKNOWN:
            raise AmbiguousZeroTest(f"normalized coefficients at y^{e} undecided")
        if t is ZeroTest.NONZERO:
            return PairData(alpha=A.id, beta=B.id, l0=l0, delta=delta, m=e, nu=diff)
    return Excluded(Exclusion.NO_DIFFERENCE)


# ---------------------------------------------------------------------------
# Packets
# ---------------------------------------------------------------------------


def _pair_key(p: PairData):
    return (p.l0, p.m, sort_key(p.nu), p.alpha, p.beta)


def delta_L(f: BivarPoly, lam: Scalar, arcs: List[PolarArc], opts: Options | None = None) -> DeltaL:
    """Packet of the singular line x = lam*y from the polar arcs tangent to it."""
    opts = opts or Options()
    eps = opts.zero_eps
    gamma = [a for a in arcs if a.is_tangential and scalars_equal(a.tangent_lambda, lam, eps)]
    leading = tuple(
        sorted(
            (Leading(h0=a.h0, a0=a.a0, mult=a.multiplicity) for a in gamma),
            key=lambda e: (e.h0, sort_key(e.a0)),
        )
    )
    pairs = []
    for A in gamma:
        for B in gamma:
            if A.id == B.id:
                continue
            r = pair_data(f, A, B, opts)
            if isinstance(r, PairData):
                pairs.append(r)
    return DeltaL(lam=lam, leading=leading, pairs=tuple(sorted(pairs, key=_pair_key)))


def _inv2_once(f: BivarPoly, opts: Options) -> Inv2:
    check_admissible(f)
    cone = tangent_cone(f, opts.prec)
    arcs = polar_arcs(f, opts, cone)
    lines = sorted((lam for lam, _ in cone.sigma_lines), key=sort_key)
    packets = pmap(lambda lam: delta_L(f, lam, arcs, opts), lines, opts.threads)
    return Inv2(packets=tuple(packets), k=cone.k, options=opts, arcs=tuple(arcs))


def inv2(f: BivarPoly, opts: Options | None = None) -> Inv2:
    """One packet per singular tangent line, escalating precision on ambiguity."""
    return escalate(lambda o: _inv2_once(f, o), opts or Options())


# ---------------------------------------------------------------------------
# The rescaling action
# ---------------------------------------------------------------------------


def rational_power(c: Scalar, e: Fraction, prec: int) -> Scalar:
    """c^e on the principal branch of the denominator root."""
    e = Fraction(e)
    base = nth_root(c, e.denominator, prec) if e.denominator != 1 else c
    n = e.numerator
    return base**n if n >= 0 else base.inverse() ** (-n)


def cstar_transform(d: DeltaL, c: Scalar, prec: int | None = None) -> DeltaL:
    """Act by c: a0 -> a0*c^h0 and nu -> nu*c^(m - l0)."""
    prec = prec or Options().prec
    leading = tuple(replace(e, a0=e.a0 * rational_power(c, e.h0, prec)) for e in d.leading)
    pairs = tuple(replace(p, nu=p.nu * rational_power(c, p.m - p.l0, prec)) for p in d.pairs)
    return DeltaL(lam=d.lam, leading=leading, pairs=pairs)


# ---------------------------------------------------------------------------
# Display
# ---------------------------------------------------------------------------


def _mono(e: Fraction) -> str:
    return f"y^{e}" if e.denominator == 1 else f"y^({e})"


def format_packet(d: DeltaL) -> str:
    lead = []
    for e in d.leading:
        coef = "" if isinstance(e.a0, Exact) and e.a0 == ONE else f"({format_scalar(e.a0)})*"
        item = f"{coef}{_mono(e.h0)}"
        lead.extend([item] * e.mult)
    pairs = [f"({format_rational(p.l0)}, ({format_scalar(p.nu)})*{_mono(p.m)})" for p in d.pairs]
    body = ", ".join(lead)
    if pairs:
        body += "; " + ", ".join(pairs)
    return "{" + body + "}"


__all__ = [
    "Excluded",
    "Exclusion",
    "PairData",
    "Leading",
    "DeltaL",
    "Inv2",
    "pair_data",
    "delta_L",
    "inv2",
    "cstar_transform",
    "rational_power",
    "format_packet",
]
