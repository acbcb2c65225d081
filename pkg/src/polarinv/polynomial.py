"""Bivariate polynomials over Gaussian-rational / ball scalars.

Also holds the expression parser, formal partials, the Sylvester resultant
in x, the tangent cone, and the two admissibility checks (mini-regularity
and square-freeness) that every germ must pass before analysis.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Tuple

from .errors import NonIntegerExponent, NotVanishingAtOrigin, PolySyntaxError, UnboundParameter
from .scalars import (
    DEFAULT_PREC,
    I,
    ONE,
    ZERO,
    Exact,
    Scalar,
    ZeroTest,
    as_scalar,
    format_scalar,
    univariate_roots,
    zero_test,
)

Monomial = Tuple[int, int]


def _grlex(mono: Monomial):
    i, j = mono
    return (i + j, i)


class BivarPoly:
    """Sparse polynomial ``sum c[i, j] x^i y^j`` with no stored zeros."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        clean: Dict[Monomial, Scalar] = {}
        for mono, c in (terms or {}).items():
            c = as_scalar(c)
            if isinstance(c, Exact) and c.is_zero_exact():
                continue
            if mono[0] < 0 or mono[1] < 0:
                raise ValueError(f"negative exponent in {mono}")
            clean[(int(mono[0]), int(mono[1]))] = c
        self._terms = dict(sorted(clean.items(), key=lambda kv: _grlex(kv[0])))

    # construction helpers ------------------------------------------------
    @classmethod
    def const(cls, c) -> "BivarPoly":
        return cls({(0, 0): as_scalar(c)})

    @classmethod
    def x(cls) -> "BivarPoly":
        return cls({(1, 0): ONE})

    @classmethod
    def y(cls) -> "BivarPoly":
        return cls({(0, 1): ONE})

    # views -----------------------------------------------------------------
    @property
    def terms(self) -> Dict[Monomial, Scalar]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, i: int, j: int) -> Scalar:
        return self._terms.get((i, j), ZERO)

    def is_zero(self) -> bool:
        return not self._terms

    def is_exact(self) -> bool:
        return all(isinstance(c, Exact) for c in self._terms.values())

    def deg_x(self) -> int:
        return max((i for i, _ in self._terms), default=-1)

    def deg_y(self) -> int:
        return max((j for _, j in self._terms), default=-1)

    def total_degree(self) -> int:
        return max((i + j for i, j in self._terms), default=-1)

    def order(self) -> int:
        """Smallest total degree of a term (the multiplicity at the origin)."""
        return min((i + j for i, j in self._terms), default=-1)

    def x_coeffs(self) -> list:
        """Coefficients of x^0..x^deg as univariate y-polynomials (ascending lists)."""
        n = self.deg_x()
        out = [[] for _ in range(n + 1)]
        for (i, j), c in self._terms.items():
            row = out[i]
            if len(row) <= j:
                row.extend([ZERO] * (j + 1 - len(row)))
            row[j] = c
        return out

    # arithmetic ------------------------------------------------------------
    def __add__(self, other):
        other = _as_poly(other)
        t = dict(self._terms)
        for mono, c in other._terms.items():
            t[mono] = t[mono] + c if mono in t else c
        return BivarPoly(t)

    __radd__ = __add__

    def __neg__(self):
        return BivarPoly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        t: Dict[Monomial, Scalar] = {}
        for (i1, j1), c1 in self._terms.items():
            for (i2, j2), c2 in other._terms.items():
                mono = (i1 + i2, j1 + j2)
                p = c1 * c2
                t[mono] = t[mono] + p if mono in t else p
        return BivarPoly(t)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = BivarPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, BivarPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    def diff_x(self) -> "BivarPoly":
        return BivarPoly({(i - 1, j): c * i for (i, j), c in self._terms.items() if i})

    def diff_y(self) -> "BivarPoly":
        return BivarPoly({(i, j - 1): c * j for (i, j), c in self._terms.items() if j})

    def homogeneous_part(self, k: int) -> "BivarPoly":
        return BivarPoly({m: c for m, c in self._terms.items() if m[0] + m[1] == k})

    def substitute_x(self, replacement: "BivarPoly") -> "BivarPoly":
        """f(replacement(x, y), y)."""
        out = BivarPoly()
        powers = {0: BivarPoly.const(1)}
        for (i, j), c in self._terms.items():
            if i not in powers:
                powers[i] = replacement ** i
            out = out + powers[i] * BivarPoly({(0, j): c})
        return out

    def scale_vars(self, cx, cy) -> "BivarPoly":
        """f(cx * x, cy * y)."""
        cx, cy = as_scalar(cx), as_scalar(cy)
        return BivarPoly({(i, j): c * cx ** i * cy ** j for (i, j), c in self._terms.items()})

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"BivarPoly({format_poly(self)!r})"


def _as_poly(v) -> BivarPoly:
    if isinstance(v, BivarPoly):
        return v
    return BivarPoly.const(v)


def _monomial_str(i, j):
    parts = []
    if i:
        parts.append("x" if i == 1 else f"x^{i}")
    if j:
        parts.append("y" if j == 1 else f"y^{j}")
    return "*".join(parts)


def format_poly(f: BivarPoly) -> str:
    """Render in the input grammar, highest degree first."""
    if f.is_zero():
        return "0"
    chunks = []
    for (i, j), c in sorted(f.items(), key=lambda kv: (-kv[0][0], kv[0][1])):
        mono = _monomial_str(i, j)
        cs = format_scalar(c)
        if isinstance(c, Exact) and not c.im:
            neg = c.re < 0
            mag = -c.re if neg else c.re
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{mag}*{mono}"
            else:
                body = str(mag)
        else:
            neg = False
            body = f"({cs})*{mono}" if mono else f"({cs})"
        chunks.append(("- " if neg else "+ ") + body)
    text = " ".join(chunks)
    if text.startswith("+ "):
        text = text[2:]
    elif text.startswith("- "):
        text = "-" + text[2:]
    return text


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<dec>\d+\.\d*|\.\d+)|(?P<int>\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            p = pos
            while p < len(text) and text[p].isspace():
                p += 1
            raise PolySyntaxError(f"unexpected character {text[p]!r}", p, text)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, params: Mapping[str, Scalar]):
        self.text = text
        self.params = {k: as_scalar(v) for k, v in params.items()}
        self.toks = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def take(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def error(self, msg, tok=None, cls=PolySyntaxError):
        tok = tok or self.peek()
        return cls(msg, tok[2], self.text)

    def expect_op(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise self.error(f"expected {op!r}", t)

    def parse(self) -> BivarPoly:
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        result = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return result

    def expr(self) -> BivarPoly:
        sign = 1
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            sign = -1 if t[1] == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                rhs = self.term()
                acc = acc + rhs if t[1] == "+" else acc - rhs
            else:
                return acc

    def term(self) -> BivarPoly:
        acc = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            acc = acc * self.factor()
        t = self.peek()
        if t[0] in ("int", "id", "dec") or (t[0] == "op" and t[1] == "("):
            raise self.error("missing '*' (multiplication must be explicit)")
        return acc

    def factor(self) -> BivarPoly:
        base = self.base()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            t = self.take()
            if t[0] != "int":
                raise self.error("exponent must be a non-negative integer", t, NonIntegerExponent)
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "/":
                raise self.error("exponent must be a non-negative integer", nxt, NonIntegerExponent)
            base = base ** int(t[1])
        return base

    def base(self) -> BivarPoly:
        t = self.take()
        kind, val = t[0], t[1]
        if kind == "int":
            num = int(val)
            if self.peek()[0] == "op" and self.peek()[1] == "/":
                self.take()
                d = self.take()
                if d[0] != "int":
                    raise self.error("expected an integer denominator", d)
                if int(d[1]) == 0:
                    raise self.error("zero denominator", d)
                return BivarPoly.const(Fraction(num, int(d[1])))
            return BivarPoly.const(num)
        if kind == "dec":
            raise self.error("decimal literals are not supported; write a fraction p/q", t)
        if kind == "id":
            if val == "x":
                return BivarPoly.x()
            if val == "y":
                return BivarPoly.y()
            if val == "i":
                return BivarPoly.const(I)
            if val not in self.params:
                raise UnboundParameter(val)
            return BivarPoly.const(self.params[val])
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        if kind == "end":
            raise self.error("unexpected end of input", t)
        raise self.error(f"unexpected {val!r}", t)


def parse_poly(text: str, params: Mapping[str, object] | None = None) -> BivarPoly:
    """Parse ``text`` into a polynomial, substituting bound parameters.

    >>> str(parse_poly("x^3 - 3*t^2*x*y^10 + y^12", {"t": 1}))
    'x^3 - 3*x*y^10 + y^12'
    """
    return _Parser(text, params or {}).parse()


def parse_scalar(text: str, params: Mapping[str, object] | None = None) -> Scalar:
    p = parse_poly(text, params)
    if any(m != (0, 0) for m, _ in p.items()):
        raise PolySyntaxError("expected a constant, found x or y", 0, text)
    return p.coeff(0, 0)


def parse_param_binding(text: str) -> Tuple[str, Scalar]:
    if "=" not in text:
        raise PolySyntaxError("parameter binding must look like name=value", 0, text)
    name, value = text.split("=", 1)
    name = name.strip()
    if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name) or name in ("x", "y", "i"):
        raise PolySyntaxError(f"invalid parameter name {name!r}", 0, text)
    return name, parse_scalar(value.strip())


# ---------------------------------------------------------------------------
# Derived objects
# ---------------------------------------------------------------------------


def partials(f: BivarPoly) -> Tuple[BivarPoly, BivarPoly]:
    return f.diff_x(), f.diff_y()


@dataclass(frozen=True)
class TangentCone:
    k: int
    h: list  # ascending coefficients of lambda -> H_k(lambda, 1)
    lines: list = field(default_factory=list)  # [(lambda, multiplicity)]

    @property
    def sigma_lines(self) -> list:
        """Lines x = lambda*y of the cone counted at least twice."""
        return [(lam, m) for lam, m in self.lines if m >= 2]


def tangent_cone(f: BivarPoly, prec: int = DEFAULT_PREC) -> TangentCone:
    if f.is_zero() or zero_test(f.coeff(0, 0)) is not ZeroTest.ZERO:
        raise NotVanishingAtOrigin("the germ must vanish at the origin and be nonzero")
    k = f.order()
    h = [f.coeff(i, k - i) for i in range(k + 1)]
    while h and isinstance(h[-1], Exact) and h[-1].is_zero_exact():
        h.pop()
    lines = univariate_roots(h, prec) if len(h) >= 2 else []
    return TangentCone(k=k, h=h, lines=lines)


def mini_regular_check(f: BivarPoly) -> bool:
    if f.is_zero():
        return False
    k = f.order()
    return zero_test(f.coeff(k, 0)) is ZeroTest.NONZERO


def squarefree_check(f: BivarPoly) -> bool:
    fx = f.diff_x()
    if fx.deg_x() <= 0:
        return not fx.is_zero()
    res = resultant_x(f, fx)
    return any(not c.is_zero_exact() for c in res)


# ---------------------------------------------------------------------------
# Univariate polynomials in y (ascending coefficient lists) and resultants
# ---------------------------------------------------------------------------


def _upoly_strip(a):
    a = list(a)
    while a and isinstance(a[-1], Exact) and a[-1].is_zero_exact():
        a.pop()
    return a


def _upoly_mul(a, b):
    if not a or not b:
        return []
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai.is_zero_exact():
            continue
        for j, bj in enumerate(b):
            out[i + j] = out[i + j] + ai * bj
    return _upoly_strip(out)


def _upoly_sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [ZERO] * (n - len(a))
    b = list(b) + [ZERO] * (n - len(b))
    return _upoly_strip([x - y for x, y in zip(a, b)])


def _upoly_exact_div(a, b):
    a = _upoly_strip(a)
    b = _upoly_strip(b)
    if not a:
        return []
    q = [ZERO] * (len(a) - len(b) + 1)
    a = list(a)
    inv = b[-1].inverse()
    for k in range(len(a) - len(b), -1, -1):
        coef = a[k + len(b) - 1] * inv
        q[k] = coef
        if not coef.is_zero_exact():
            for i, bi in enumerate(b):
                a[k + i] = a[k + i] - coef * bi
    if _upoly_strip(a):
        raise ArithmeticError("inexact division in Bareiss elimination")
    return _upoly_strip(q)


def _bareiss_det(m):
    n = len(m)
    m = [list(row) for row in m]
    sign = 1
    prev = [ONE]
    for k in range(n - 1):
        if not m[k][k]:
            swap = next((r for r in range(k + 1, n) if m[r][k]), None)
            if swap is None:
                return []
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = _upoly_sub(_upoly_mul(m[i][j], m[k][k]), _upoly_mul(m[i][k], m[k][j]))
                m[i][j] = _upoly_exact_div(num, prev)
            m[i][k] = []
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign > 0 else [-c for c in det]


def resultant_x(f: BivarPoly, g: BivarPoly) -> list:
    """Res_x(f, g) as an ascending coefficient list in y.

    Sylvester convention: rows of f first, so that
    ``Res_x(f, g) = lc(f)^deg(g) * prod g(roots of f)``; e.g.
    ``Res_x(x^2 - y, x) = -y``. Computed by fraction-free Bareiss elimination.
    """
    if not (f.is_exact() and g.is_exact()):
        raise TypeError("resultant_x needs exact coefficients")
    fc = [_upoly_strip(c) for c in f.x_coeffs()]
    gc = [_upoly_strip(c) for c in g.x_coeffs()]
    m, n = len(fc) - 1, len(gc) - 1
    if m < 1 or n < 1:
        raise ValueError("resultant_x needs positive x-degree on both sides")
    size = m + n
    rows = []
    for r in range(n):
        row = [[] for _ in range(size)]
        for k in range(m + 1):
            row[r + k] = fc[m - k]
        rows.append(row)
    for r in range(m):
        row = [[] for _ in range(size)]
        for k in range(n + 1):
            row[r + k] = gc[n - k]
        rows.append(row)
    return _bareiss_det(rows)


def upoly_order(a: Iterable[Scalar]) -> int | None:
    """Index of the first nonzero coefficient, None for the zero polynomial."""
    for k, c in enumerate(a):
        if not (isinstance(c, Exact) and c.is_zero_exact()):
            return k
    return None
