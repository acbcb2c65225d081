"""Decide whether two invariants are related by the rescaling action c in C*.

Each packet element is a value v attached to a class key and a rational
exponent e (h0 for leading data, m - l0 for pairs). With D the common
denominator of all exponents and u standing for a D-th root of c, the action
is v -> v * u^(D*e), so every constraint is polynomial in u.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from gmpy2 import mpfr, mpq

from .errors import AmbiguousComparison, ExplosionGuard
from .invariant import DeltaL, Inv2
from .options import Options
from .scalars import (
    Exact,
    Scalar,
    default_eps,
    format_rational,
    format_scalar,
    nth_root,
    root_of_unity,
    scalar_to_json,
    sort_key,
)

MAX_CHECKS = 10**6


class Decision(enum.Enum):
    NOT_EQUIVALENT = "NotEquivalent"
    CONSISTENT = "ConsistentWithEquivalence"


@dataclass(frozen=True)
class Witness:
    u: Scalar
    D: int

    @property
    def c(self) -> Scalar:
        return self.u**self.D


@dataclass(frozen=True)
class Refutation:
    line_pair: Tuple[int, int]
    constraints: Tuple[str, ...]

    def to_json(self) -> dict:
        return {"line_pair": list(self.line_pair), "constraints": list(self.constraints)}


@dataclass(frozen=True)
class EquivalenceReport:
    decision: Decision
    witnesses: Tuple[Tuple[Tuple[Tuple[int, int], ...], Tuple[Tuple[Scalar, ...], ...]], ...] = ()
    refutations: Tuple[Refutation, ...] = ()
    warnings: Tuple[str, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "decision": self.decision.value,
            "witnesses": [
                {
                    "line_map": [list(p) for p in line_map],
                    "c": [[scalar_to_json(c) for c in cs] for cs in per_line],
                }
                for line_map, per_line in self.witnesses
            ],
            "refutations": [r.to_json() for r in self.refutations],
            "warnings": list(self.warnings),
        }


# ---------------------------------------------------------------------------
# Packet elements
# ---------------------------------------------------------------------------


def _elements(d: DeltaL) -> Dict[tuple, List[Tuple[Fraction, Scalar]]]:
    """Class key -> [(exponent, value)]; multiplicities are part of the key."""
    out: Dict[tuple, list] = {}
    for e in d.leading:
        out.setdefault(("lead", e.h0, e.mult), []).append((e.h0, e.a0))
    for p in d.pairs:
        out.setdefault(("pair", p.l0, p.m), []).append((p.m - p.l0, p.nu))
    return out


def _signature(d: DeltaL):
    return sorted((k, len(v)) for k, v in _elements(d).items())


def _common_denominator(d: DeltaL) -> int:
    D = 1
    for items in _elements(d).values():
        for e, _ in items:
            D = math.lcm(D, e.denominator)
    return D


def all_nth_roots(z: Scalar, n: int, prec: int) -> List[Scalar]:
    """The n distinct n-th roots of z; exact ones stay exact."""
    r = nth_root(z, n, prec)
    return [r * root_of_unity(k, n, prec) for k in range(n)]


def _tol_mpfr(tol) -> mpfr:
    tol = Fraction(tol)
    return mpfr(mpq(tol.numerator, tol.denominator))


def _close(w: Scalar, v: Scalar, tol) -> bool:
    """|w - v| <= tol * max(1, |v|); exact inputs are compared exactly."""
    if isinstance(w, Exact) and isinstance(v, Exact):
        return w == v
    d = w - v
    bound = _tol_mpfr(tol) * max(mpfr(1), v.abs_upper())
    if d.abs_upper() <= bound:
        return True
    if d.abs_lower() > bound:
        return False
    raise AmbiguousComparison(f"|{format_scalar(w)} - {format_scalar(v)}| straddles the tolerance")


def _perfect_matching(left: Sequence, right: Sequence, edge) -> bool:
    """Kuhn's augmenting paths; ``edge(i, j)`` decides adjacency."""
    if len(left) != len(right):
        return False
    n = len(left)
    adj = [[j for j in range(n) if edge(i, j)] for i in range(n)]
    match_r = [-1] * n

    def augment(i, seen):
        for j in adj[i]:
            if j in seen:
                continue
            seen.add(j)
            if match_r[j] < 0 or augment(match_r[j], seen):
                match_r[j] = i
                return True
        return False

    return all(augment(i, set()) for i in range(n))


def _dedupe(values: List[Scalar], tol) -> List[Scalar]:
    out: List[Scalar] = []
    for v in sorted(values, key=lambda s: (not isinstance(s, Exact), sort_key(s))):
        if not any(_close(v, w, tol) for w in out):
            out.append(v)
    return sorted(out, key=sort_key)


def delta_equivalent(d1: DeltaL, d2: DeltaL, tol=None, prec: int | None = None) -> List[Witness]:
    """All u (a D-th root of c) carrying d1 onto d2; empty when none exists."""
    prec = prec or Options().prec
    tol = tol if tol is not None else default_eps(prec)
    if _signature(d1) != _signature(d2):
        return []
    E1, E2 = _elements(d1), _elements(d2)
    if not E1:
        return [Witness(u=Exact(1), D=1)]
    D = math.lcm(_common_denominator(d1), _common_denominator(d2))
    anchor = min(E1, key=lambda k: (len(E1[k]) * int(E1[k][0][0] * D), k))
    e_anchor = int(E1[anchor][0][0] * D)
    v1 = E1[anchor][0][1]
    candidates: List[Scalar] = []
    for _, w in E2[anchor]:
        candidates.extend(all_nth_roots(w / v1, e_anchor, prec))
    candidates = _dedupe(candidates, tol)

    checks = 0
    survivors = []
    for u in candidates:
        ok = True
        for key, left in E1.items():
            right = E2[key]
            checks += len(left) * len(right)
            if checks > MAX_CHECKS:
                raise ExplosionGuard("witness search exceeded 10^6 candidate checks")
            powed = [v * u ** int(e * D) for e, v in left]
            if not _perfect_matching(powed, right, lambda i, j: _close(right[j][1], powed[i], tol)):
                ok = False
                break
        if ok:
            survivors.append(Witness(u=u, D=D))
    return survivors


def witness_constants(ws: List[Witness], tol) -> List[Scalar]:
    """Distinct values c = u^D from a witness list."""
    return _dedupe([w.c for w in ws], tol)


# ---------------------------------------------------------------------------
# Refutation certificates
# ---------------------------------------------------------------------------


def _fmt_power(e: Fraction) -> str:
    if e == 1:
        return "c"
    return f"c^{e}" if e.denominator == 1 else f"c^({e})"


def _ratio_key(s: Scalar):
    re, im = sort_key(s)
    return (re < 0, abs(re), im)


def constraints(d1: DeltaL, d2: DeltaL, tol, prec: int) -> Tuple[str, ...]:
    """Per-class constraint on c that any identification must satisfy."""
    s1, s2 = _signature(d1), _signature(d2)
    if s1 != s2:
        return (f"exponent signatures differ: {_fmt_sig(s1)} vs {_fmt_sig(s2)}",)
    E1, E2 = _elements(d1), _elements(d2)
    out = []
    for key in sorted(E1, key=lambda k: (k[0] != "lead", k[1:])):
        e, v1 = E1[key][0]
        ratios = _dedupe([w / v1 for _, w in E2[key]], tol)
        ratios.sort(key=_ratio_key)
        if len(ratios) == 1:
            out.append(f"{_fmt_power(e)} = {format_scalar(ratios[0])}")
        else:
            out.append(f"{_fmt_power(e)} in {{{','.join(format_scalar(r) for r in ratios)}}}")
    return tuple(out)


def _fmt_sig(sig) -> str:
    parts = []
    for (kind, a, b), n in sig:
        if kind == "lead":
            parts.append(f"h0={format_rational(a)}" + (f" mult {b}" if b != 1 else "") + f" x{n}")
        else:
            parts.append(f"(l0={format_rational(a)}, m={format_rational(b)}) x{n}")
    return "[" + ", ".join(parts) + "]"


# ---------------------------------------------------------------------------
# Whole invariants
# ---------------------------------------------------------------------------


def inv2_equivalent(I1: Inv2, I2: Inv2, tol=None, prec: int | None = None) -> EquivalenceReport:
    """Try every bijection of packets; constants may differ across lines."""
    prec = prec or min(I1.options.prec, I2.options.prec)
    tol = tol if tol is not None else default_eps(prec)
    warnings = []
    if I1.k != I2.k:
        warnings.append(f"germ multiplicities differ ({I1.k} vs {I2.k}); not part of the invariant")
    P1, P2 = I1.packets, I2.packets
    if len(P1) != len(P2):
        ref = Refutation(line_pair=(-1, -1), constraints=(f"packet counts differ: {len(P1)} vs {len(P2)}",))
        return EquivalenceReport(Decision.NOT_EQUIVALENT, refutations=(ref,), warnings=tuple(warnings))
    n = len(P1)
    if math.factorial(n) > MAX_CHECKS:
        raise ExplosionGuard("too many line bijections")
    table = {(i, j): delta_equivalent(P1[i], P2[j], tol, prec) for i in range(n) for j in range(n)}
    witnesses = []
    for perm in itertools.permutations(range(n)):
        line_map = tuple((i, perm[i]) for i in range(n))
        if all(table[p] for p in line_map):
            per_line = tuple(tuple(witness_constants(table[p], tol)) for p in line_map)
            witnesses.append((line_map, per_line))
    if witnesses:
        return EquivalenceReport(Decision.CONSISTENT, witnesses=tuple(witnesses), warnings=tuple(warnings))
    refs = tuple(
        Refutation(line_pair=(i, j), constraints=constraints(P1[i], P2[j], tol, prec))
        for i in range(n)
        for j in range(n)
        if not table[(i, j)]
    )
    return EquivalenceReport(Decision.NOT_EQUIVALENT, refutations=refs, warnings=tuple(warnings))


def format_report(r: EquivalenceReport) -> str:
    lines = [f"decision: {r.decision.value}"]
    for line_map, per_line in r.witnesses:
        pairs = ", ".join(f"L{i}->L{j}" for i, j in line_map) or "(no singular lines)"
        lines.append(f"witness: {pairs}")
        for (i, j), cs in zip(line_map, per_line):
            lines.append(f"  L{i}->L{j}: c in {{{', '.join(format_scalar(c) for c in cs)}}}")
    for ref in r.refutations:
        i, j = ref.line_pair
        head = "refutation" if i < 0 else f"refutation L{i}->L{j}"
        lines.append(f"{head}: " + "; ".join(ref.constraints))
    for w in r.warnings:
        lines.append(f"warning: {w}")
    return "\n".join(lines)

