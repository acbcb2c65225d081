"""Sparse fractional power series in y, stored as ``{Fraction exponent: Scalar}``.

All functions treat their inputs as immutable and return new dicts. A bound
``upto`` truncates the result to exponents strictly below it.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable

from .errors import AmbiguousZeroTest
from .scalars import Exact, Scalar, ZeroTest, zero_test

Series = Dict[Fraction, Scalar]

INF = math.inf


def clean(s: Series, eps) -> Series:
    """Drop coefficients that test as zero; undecided ones raise."""
    out = {}
    for e, c in s.items():
        if isinstance(c, Exact):
            if not c.is_zero_exact():
                out[e] = c
            continue
        t = zero_test(c, eps)
        if t is ZeroTest.NONZERO:
            out[e] = c
        elif t is ZeroTest.UNKNOWN:
            raise AmbiguousZeroTest(f"coefficient of y^{e} undecided")
    return out


def order(s: Series, eps):
    """Exponent of the first nonzero coefficient, ``inf`` if there is none."""
    for e in sorted(s):
        c = s[e]
        if isinstance(c, Exact):
            if not c.is_zero_exact():
                return e
            continue
        t = zero_test(c, eps)
        if t is ZeroTest.NONZERO:
            return e
        if t is ZeroTest.UNKNOWN:
            raise AmbiguousZeroTest(f"coefficient of y^{e} undecided")
    return INF


def add(a: Series, b: Series) -> Series:
    out = dict(a)
    for e, c in b.items():
        out[e] = out[e] + c if e in out else c
    return out


def scale(a: Series, c: Scalar, shift: Fraction = Fraction(0)) -> Series:
    return {e + shift: v * c for e, v in a.items()}


def mul(a: Series, b: Series, upto=INF) -> Series:
    out: Series = {}
    if not a or not b:
        return out
    bmin = min(b)
    for ea, ca in a.items():
        if ea + bmin >= upto:
            continue
        for eb, cb in b.items():
            e = ea + eb
            if e >= upto:
                continue
            p = ca * cb
            out[e] = out[e] + p if e in out else p
    return out


def power(a: Series, n: int, upto=INF) -> Series:
    result: Series = {Fraction(0): Exact(1)}
    base = a
    while n:
        if n & 1:
            result = mul(result, base, upto)
        n >>= 1
        if n:
            base = mul(base, base, upto)
    return result


def truncate(a: Series, upto) -> Series:
    return {e: c for e, c in a.items() if e < upto}


def divide(num: Series, den: Series, upto, eps) -> Series:
    """Quotient ``num/den`` as a Laurent-Puiseux series, exponents < ``upto``."""
    den = clean(den, eps)
    if not den:
        raise ZeroDivisionError("series division by zero")
    d0 = min(den)
    inv = den[d0].inverse()
    rem = dict(num)
    q: Series = {}
    limit = upto + d0
    while True:
        rem = {e: c for e, c in rem.items() if e < limit}
        lead = None
        for e in sorted(rem):
            c = rem[e]
            if isinstance(c, Exact) and c.is_zero_exact():
                continue
            t = ZeroTest.NONZERO if isinstance(c, Exact) else zero_test(c, eps)
            if t is ZeroTest.ZERO:
                continue
            if t is ZeroTest.UNKNOWN:
                raise AmbiguousZeroTest(f"remainder coefficient of y^{e} undecided")
            lead = e
            break
        if lead is None:
            return q
        coef = rem[lead] * inv
        qe = lead - d0
        q[qe] = coef
        for e, c in den.items():
            k = e + qe
            if k >= limit:
                continue
            rem[k] = rem[k] - coef * c if k in rem else -(coef * c)
        # the leading term cancels by construction
        rem.pop(lead, None)
        rem = {e: c for e, c in rem.items() if e > lead}


def from_terms(terms: Iterable) -> Series:
    return {Fraction(e): c for e, c in terms}


def sorted_terms(s: Series):
    return sorted(s.items(), key=lambda kv: kv[0])
