"""Coefficient arithmetic.

Two representations share one interface:

* :class:`Exact` -- Gaussian rationals ``re + im*i`` over :class:`fractions.Fraction`.
* :class:`Approx` -- an arbitrary precision complex centre (``gmpy2.mpc``) with an
  absolute error radius that is propagated with upward rounding.

Exact op Exact stays Exact. Anything touching an Approx becomes Approx.
Exponents throughout the package are plain :class:`fractions.Fraction`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr, mpq

from .errors import AmbiguousZeroTest, PrecisionError, PrecisionExhausted

DEFAULT_PREC = 256
MAX_PREC = 4096
MIN_PREC = 64

_ERR_PREC = 64


def default_eps(prec: int) -> Fraction:
    return Fraction(1, 2 ** (prec // 2))


def _up():
    return gmpy2.context(precision=_ERR_PREC, round=gmpy2.RoundUp)


def _down():
    return gmpy2.context(precision=_ERR_PREC, round=gmpy2.RoundDown)


class ZeroTest(enum.Enum):
    ZERO = "zero"
    NONZERO = "nonzero"
    UNKNOWN = "unknown"


# ---------------------------------------------------------------------------
# Exact Gaussian rationals
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Exact:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    is_exact = True

    def __post_init__(self):
        if not isinstance(self.re, Fraction):
            object.__setattr__(self, "re", Fraction(self.re))
        if not isinstance(self.im, Fraction):
            object.__setattr__(self, "im", Fraction(self.im))

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = as_scalar(other)
        if isinstance(other, Exact):
            return Exact(self.re + other.re, self.im + other.im)
        return _approx_add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return Exact(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-as_scalar(other))

    def __rsub__(self, other):
        return as_scalar(other) + (-self)

    def __mul__(self, other):
        other = as_scalar(other)
        if isinstance(other, Exact):
            if not self.im and not other.im:
                return Exact(self.re * other.re, Fraction(0))
            return Exact(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        return _approx_mul(self, other)

    __rmul__ = __mul__

    def inverse(self):
        if not self.im:
            if not self.re:
                raise ZeroDivisionError("inverse of exact zero")
            return Exact(1 / self.re, Fraction(0))
        n = self.re * self.re + self.im * self.im
        return Exact(self.re / n, -self.im / n)

    def __truediv__(self, other):
        other = as_scalar(other)
        if isinstance(other, Exact):
            return self * other.inverse()
        return _approx_div(self, other)

    def __rtruediv__(self, other):
        return as_scalar(other) / self

    def __pow__(self, n: int):
        return _int_pow(self, n)

    def conjugate(self):
        return Exact(self.re, -self.im)

    def is_zero_exact(self):
        return not self.re and not self.im

    def __bool__(self):
        return not self.is_zero_exact()

    # views --------------------------------------------------------------
    @property
    def prec(self):
        return None

    def to_mpc(self, prec: int):
        with gmpy2.context(precision=prec):
            return mpc(mpq(self.re.numerator, self.re.denominator),
                       mpq(self.im.numerator, self.im.denominator))

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def abs_upper(self):
        with _up():
            return abs(self.to_mpc(_ERR_PREC + 8))

    def abs_lower(self):
        with _down():
            return abs(self.to_mpc(_ERR_PREC + 8)) * mpfr("0.9999999999")

    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"Exact({format_scalar(self)})"


# ---------------------------------------------------------------------------
# Approximate complex balls
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False, slots=True)
class Approx:
    center: object  # gmpy2.mpc
    err: object  # gmpy2.mpfr, absolute error bound
    prec: int

    is_exact = False

    def __post_init__(self):
        if self.prec < MIN_PREC:
            raise ValueError(f"precision must be >= {MIN_PREC} bits")

    def __add__(self, other):
        return _approx_add(self, as_scalar(other))

    __radd__ = __add__

    def __neg__(self):
        with gmpy2.context(precision=self.prec):
            return Approx(-self.center, self.err, self.prec)

    def __sub__(self, other):
        return _approx_add(self, -as_scalar(other))

    def __rsub__(self, other):
        return _approx_add(-self, as_scalar(other))

    def __mul__(self, other):
        return _approx_mul(self, as_scalar(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return _approx_div(self, as_scalar(other))

    def __rtruediv__(self, other):
        return _approx_div(as_scalar(other), self)

    def inverse(self):
        return _approx_div(ONE, self)

    def __pow__(self, n: int):
        return _int_pow(self, n)

    def conjugate(self):
        with gmpy2.context(precision=self.prec):
            return Approx(self.center.conjugate(), self.err, self.prec)

    def is_zero_exact(self):
        return False

    def to_mpc(self, prec: int):
        with gmpy2.context(precision=prec):
            return mpc(self.center)

    def to_complex(self) -> complex:
        return complex(self.center)

    def abs_upper(self):
        with _up():
            return abs(self.center) + self.err

    def abs_lower(self):
        with _down():
            v = abs(self.center) * mpfr("0.9999999999") - self.err
        return v if v > 0 else mpfr(0)

    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"Approx({complex(self.center)}, err={float(self.err):.3g}, prec={self.prec})"


Scalar = Union[Exact, Approx]

ZERO = Exact(Fraction(0), Fraction(0))
ONE = Exact(Fraction(1), Fraction(0))
I = Exact(Fraction(0), Fraction(1))


def as_scalar(v) -> Scalar:
    if isinstance(v, (Exact, Approx)):
        return v
    if isinstance(v, (int, Fraction)):
        return Exact(Fraction(v), Fraction(0))
    if isinstance(v, complex):
        raise TypeError("pass complex values through make_approx to fix a precision")
    raise TypeError(f"cannot coerce {type(v).__name__} to a scalar")


def make_approx(value, prec: int = DEFAULT_PREC, err=0) -> Approx:
    with gmpy2.context(precision=prec):
        c = mpc(value)
    with _up():
        e = mpfr(err) + abs(c) * mpfr(2) ** (1 - prec)
    return Approx(c, e, prec)


def _parts(s: Scalar, prec: int):
    if isinstance(s, Approx):
        return s.to_mpc(prec), s.err
    c = s.to_mpc(prec)
    if _dyadic(s.re) and _dyadic(s.im):
        return c, mpfr(0)
    with _up():
        return c, abs(c) * mpfr(2) ** (1 - prec)


def _dyadic(q: Fraction) -> bool:
    d = q.denominator
    return d & (d - 1) == 0


def _prec_of(a: Scalar, b: Scalar) -> int:
    pa = a.prec if isinstance(a, Approx) else 0
    pb = b.prec if isinstance(b, Approx) else 0
    return max(pa, pb, MIN_PREC)


def _rnd(c, prec):
    with _up():
        return abs(c) * mpfr(2) ** (2 - prec)


def _approx_add(a: Scalar, b: Scalar) -> Approx:
    p = _prec_of(a, b)
    ca, ea = _parts(a, p)
    cb, eb = _parts(b, p)
    with gmpy2.context(precision=p):
        c = ca + cb
    with _up():
        e = ea + eb + _rnd(c, p)
    return Approx(c, e, p)


def _approx_mul(a: Scalar, b: Scalar) -> Scalar:
    if isinstance(a, Exact) and a.is_zero_exact() or isinstance(b, Exact) and b.is_zero_exact():
        return ZERO
    p = _prec_of(a, b)
    ca, ea = _parts(a, p)
    cb, eb = _parts(b, p)
    with gmpy2.context(precision=p):
        c = ca * cb
    with _up():
        e = abs(ca) * eb + abs(cb) * ea + ea * eb + _rnd(c, p)
    return Approx(c, e, p)


def _approx_div(a: Scalar, b: Scalar) -> Scalar:
    if isinstance(a, Exact) and a.is_zero_exact():
        return ZERO
    p = _prec_of(a, b)
    ca, ea = _parts(a, p)
    cb, eb = _parts(b, p)
    with _down():
        lower = abs(cb) - eb
    if lower <= 0:
        raise AmbiguousZeroTest("division by a ball that contains zero")
    with gmpy2.context(precision=p):
        c = ca / cb
    with _up():
        e = (ea + abs(c) * eb) / lower + _rnd(c, p)
    return Approx(c, e, p)


def _int_pow(x: Scalar, n: int) -> Scalar:
    if n < 0:
        return _int_pow(x.inverse(), -n)
    result: Scalar = ONE
    base = x
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


# ---------------------------------------------------------------------------
# Zero tests
# ---------------------------------------------------------------------------


def zero_test(s: Scalar, eps=None) -> ZeroTest:
    """Tri-state zero test.

    Exact values are decided exactly and ``eps`` is ignored. For an Approx
    ball, NONZERO needs ``|center| > err + eps`` and ZERO needs
    ``|center| + err <= eps``; anything in between is UNKNOWN.
    """
    if isinstance(s, Exact):
        return ZeroTest.ZERO if s.is_zero_exact() else ZeroTest.NONZERO
    if eps is None:
        eps = default_eps(s.prec)
    eps = mpfr(mpq(eps.numerator, eps.denominator)) if isinstance(eps, Fraction) else mpfr(eps)
    with _down():
        lo = abs(s.center)
    with _up():
        hi = abs(s.center) + s.err
        thresh = s.err + eps
    if lo > thresh:
        return ZeroTest.NONZERO
    if hi <= eps:
        return ZeroTest.ZERO
    return ZeroTest.UNKNOWN


def is_zero(s: Scalar, eps=None) -> bool:
    """Two-state zero test; raises AmbiguousZeroTest so callers can escalate."""
    r = zero_test(s, eps)
    if r is ZeroTest.UNKNOWN:
        raise AmbiguousZeroTest(f"cannot decide whether {s!r} is zero")
    return r is ZeroTest.ZERO


def scalars_equal(a: Scalar, b: Scalar, eps=None) -> bool:
    if isinstance(a, Exact) and isinstance(b, Exact):
        return a == b
    return is_zero(a - b, eps)


def sort_key(s: Scalar):
    """Deterministic ordering key: real part, then imaginary part."""
    if isinstance(s, Exact):
        return (float(s.re), float(s.im))
    c = s.center
    # round away the noise so equal balls sort identically across runs
    return (round(float(c.real), 12), round(float(c.imag), 12))


# ---------------------------------------------------------------------------
# Formatting
# ---------------------------------------------------------------------------


def format_scalar(s: Scalar) -> str:
    if isinstance(s, Approx):
        return _fmt_approx_short(s)
    re, im = s.re, s.im
    if not im:
        return str(re)
    if im == 1:
        ims = "i"
    elif im == -1:
        ims = "-i"
    else:
        ims = f"{im}*i"
    if not re:
        return ims
    sep = "" if ims.startswith("-") else "+"
    return f"{re}{sep}{ims}"


def _fmt_approx_short(s: Approx, digits: int = 12) -> str:
    re = float(s.center.real)
    im = float(s.center.imag)
    if abs(im) <= float(s.err):
        return f"~{re:.{digits}g}"
    if abs(re) <= float(s.err):
        return f"~{im:.{digits}g}*i"
    return f"~({re:.{digits}g}{im:+.{digits}g}*i)"


def scalar_to_json(s: Scalar):
    if isinstance(s, Exact):
        return format_scalar(s)
    digits = max(20, int(s.prec * 0.30103) + 2)
    return {
        "re": s.center.real.__format__(f".{digits}g"),
        "im": s.center.imag.__format__(f".{digits}g"),
        "err": format(s.err, ".8Ug"),  # rounded up so the radius stays an upper bound
        "prec": str(s.prec),
    }


def scalar_from_json(obj) -> Scalar:
    if isinstance(obj, str):
        from .polynomial import parse_scalar

        return parse_scalar(obj)
    prec = int(obj["prec"])
    with gmpy2.context(precision=prec):
        c = mpc(mpfr(obj["re"]), mpfr(obj["im"]))
    with _up():
        # decimal round trip costs at most one ulp per component
        err = mpfr(obj["err"]) + (abs(c.real) + abs(c.imag)) * mpfr(2) ** (1 - prec)
    return Approx(c, err, prec)


def format_rational(q) -> str:
    if q is None or (isinstance(q, float) and math.isinf(q)):
        return "inf"
    return str(Fraction(q))


def parse_rational(text: str):
    if text == "inf":
        return math.inf
    return Fraction(text)


# ---------------------------------------------------------------------------
# Roots of unity and radicals
# ---------------------------------------------------------------------------


def root_of_unity(k: int, n: int, prec: int = DEFAULT_PREC) -> Scalar:
    """exp(2*pi*i*k/n); exact when k/n reduces to a denominator in {1, 2, 4}."""
    frac = Fraction(k, n) % 1
    if frac == 0:
        return ONE
    if frac == Fraction(1, 2):
        return Exact(-1)
    if frac == Fraction(1, 4):
        return I
    if frac == Fraction(3, 4):
        return -I
    with gmpy2.context(precision=prec + 16):
        ang = 2 * gmpy2.const_pi() * mpq(frac.numerator, frac.denominator)
        c = mpc(gmpy2.cos(ang), gmpy2.sin(ang))
    with gmpy2.context(precision=prec):
        c = mpc(c)
    with _up():
        e = mpfr(2) ** (2 - prec)
    return Approx(c, e, prec)


def _isqrt_fraction(q: Fraction):
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def exact_sqrt(z: Exact):
    """A square root of z inside Q(i), or None if it does not exist."""
    a, b = z.re, z.im
    if not b:
        r = _isqrt_fraction(a) if a >= 0 else _isqrt_fraction(-a)
        if r is None:
            return None
        return Exact(r) if a >= 0 else Exact(0, r)
    mod = _isqrt_fraction(a * a + b * b)
    if mod is None:
        return None
    p = _isqrt_fraction((a + mod) / 2)
    if p is None or not p:
        return None
    q = b / (2 * p)
    return Exact(p, q)


def _snap(c, max_den: int):
    """Closest Gaussian rational with bounded denominators to an mpc."""
    re = Fraction(*c.real.as_integer_ratio()).limit_denominator(max_den)
    im = Fraction(*c.imag.as_integer_ratio()).limit_denominator(max_den)
    return Exact(re, im)


def nth_root(x: Scalar, q: int, prec: int = DEFAULT_PREC) -> Scalar:
    """Principal q-th root; exact whenever a Gaussian rational root exists."""
    if q == 1:
        return x
    if isinstance(x, Exact):
        if x.is_zero_exact():
            return ZERO
        if q == 2:
            r = exact_sqrt(x)
            if r is not None:
                return _principal_exact(r, x, 2, prec)
        with gmpy2.context(precision=prec + 32):
            approx = x.to_mpc(prec + 32) ** (mpfr(1) / q)
        cand = _snap(approx, 2 ** min(64, prec // 4))
        if cand ** q == x:
            return cand
    with gmpy2.context(precision=prec + 32):
        c = x.to_mpc(prec + 32) ** (mpfr(1) / q)
    coeffs = [-x] + [ZERO] * (q - 1) + [ONE]
    with gmpy2.context(precision=prec):
        c = mpc(c)
    return _ball_from_residual(coeffs, c, prec)


def _principal_exact(r: Exact, x: Exact, q: int, prec: int) -> Exact:
    # choose the branch closest to the principal one
    with gmpy2.context(precision=prec):
        target = x.to_mpc(prec) ** (mpfr(1) / q)
    if abs(r.to_mpc(prec) - target) > abs((-r).to_mpc(prec) - target):
        return -r
    return r


# ---------------------------------------------------------------------------
# Univariate roots
# ---------------------------------------------------------------------------


def _trim(coeffs: Sequence[Scalar], eps=None) -> list:
    c = list(coeffs)
    while c and zero_test(c[-1], eps) is ZeroTest.ZERO:
        c.pop()
    if c and zero_test(c[-1], eps) is ZeroTest.UNKNOWN:
        raise AmbiguousZeroTest("leading coefficient undecided")
    return c


def _poly_eval(coeffs, z):
    acc = coeffs[-1]
    for a in reversed(coeffs[:-1]):
        acc = acc * z + a
    return acc


def _exact_divmod(num: list, den: list):
    num = list(num)
    q = [ZERO] * max(len(num) - len(den) + 1, 1)
    inv_lc = den[-1].inverse()
    for k in range(len(num) - len(den), -1, -1):
        coef = num[k + len(den) - 1] * inv_lc
        q[k] = coef
        if coef:
            for i, d in enumerate(den):
                num[k + i] = num[k + i] - coef * d
    rem = num[: len(den) - 1]
    while rem and not rem[-1]:
        rem.pop()
    return q, rem


def _exact_gcd(a: list, b: list) -> list:
    a, b = _strip_exact(a), _strip_exact(b)
    while b:
        _, r = _exact_divmod(a, b)
        a, b = b, _strip_exact(r)
    lc = a[-1].inverse()
    return [c * lc for c in a]


def _strip_exact(a):
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def _derivative(a):
    return [a[k] * k for k in range(1, len(a))]


def squarefree_decomposition(p: list) -> list:
    """Yun's algorithm over Q(i): returns [(factor, multiplicity), ...]."""
    p = _strip_exact(p)
    out = []
    dp = _derivative(p)
    g = _exact_gcd(p, dp) if dp else [ONE]
    b, _ = _exact_divmod(p, g)
    c, _ = _exact_divmod(dp, g) if dp else ([ZERO], None)
    c = _strip_exact(c)
    k = 1
    while len(_strip_exact(b)) > 1:
        db = _derivative(b)
        d = [ci - dbi for ci, dbi in zip(_pad(c, len(db)), _pad(db, len(c)))]
        d = _strip_exact(d)
        a = _exact_gcd(b, d) if d else b
        if len(a) > 1:
            out.append((a, k))
        b, _ = _exact_divmod(b, a)
        c, _ = _exact_divmod(d, a) if d else ([ZERO], None)
        c = _strip_exact(c)
        k += 1
    return out


def _pad(a, n):
    return list(a) + [ZERO] * max(0, n - len(a))


def univariate_roots(coeffs: Sequence[Scalar], target_prec: int = DEFAULT_PREC, eps=None):
    """All complex roots of ``sum coeffs[k] z^k`` with multiplicities.

    Coefficients are in ascending order. Exact inputs go through a
    square-free decomposition and closed forms / rational snapping first;
    remaining roots are approximated by Aberth iteration with a
    residual-based error radius. Returns ``[(root, multiplicity), ...]``.
    """
    coeffs = [as_scalar(c) for c in coeffs]
    if eps is None:
        eps = default_eps(target_prec)
    c = _trim(coeffs, eps)
    if len(c) < 2:
        raise ValueError("univariate_roots needs a polynomial of degree >= 1")
    nz = 0
    while zero_test(c[nz], eps) is ZeroTest.ZERO:
        nz += 1
    if zero_test(c[nz], eps) is ZeroTest.UNKNOWN:
        raise AmbiguousZeroTest("trailing coefficient undecided")
    out = []
    if nz:
        out.append((ZERO, nz))
    c = c[nz:]
    if len(c) == 1:
        return out
    if all(isinstance(a, Exact) for a in c):
        for factor, mult in squarefree_decomposition(c):
            for r in _roots_squarefree_exact(factor, target_prec):
                out.append((r, mult))
    else:
        out.extend(_roots_approx(c, target_prec))
    return out


def _roots_squarefree_exact(g: list, prec: int) -> list:
    deg = len(g) - 1
    if deg == 0:
        return []
    if deg == 1:
        return [-g[0] / g[1]]
    if deg == 2:
        a, b, c0 = g[2], g[1], g[0]
        disc = b * b - a * c0 * 4
        s = exact_sqrt(disc)
        if s is not None:
            return [(-b + s) / (a * 2), (-b - s) / (a * 2)]
    approx = _aberth(g, prec)
    found = []
    rest = list(g)
    max_den = 2 ** min(64, prec // 4)
    for z in approx:
        cand = _snap(z, max_den)
        if len(rest) > 1 and _poly_eval(rest, cand).is_zero_exact():
            found.append(cand)
            rest, _ = _exact_divmod(rest, [-cand, ONE])
    if found:
        return found + _roots_squarefree_exact(rest, prec)
    balls = [_ball_from_residual(g, z, prec) for z in approx]
    _check_disjoint(balls)
    return balls


def _check_disjoint(balls):
    for i in range(len(balls)):
        for j in range(i + 1, len(balls)):
            with _down():
                dist = abs(balls[i].center - balls[j].center)
            with _up():
                rad = balls[i].err + balls[j].err
            if dist <= rad:
                raise PrecisionError("root discs of a square-free factor overlap")


def _initial_guesses(coeffs, prec):
    n = len(coeffs) - 1
    try:
        cc = [a.to_complex() for a in coeffs]
        if all(np.isfinite(v) for v in cc):
            guesses = list(np.roots(cc[::-1]))
            if len(guesses) == n and all(np.isfinite(g) for g in guesses):
                # separate coincident starts; Aberth needs distinct points
                res = []
                for k, g in enumerate(guesses):
                    g = complex(g)
                    while any(abs(g - h) < 1e-9 * max(1.0, abs(g)) for h in res):
                        g += 1e-6 * complex(math.cos(k + 1), math.sin(k + 1)) * max(1.0, abs(g))
                    res.append(g)
                return res
    except (OverflowError, ValueError, np.linalg.LinAlgError):
        pass
    lc = abs(coeffs[-1].to_complex()) or 1.0
    radius = 1.0 + max(abs(a.to_complex()) / lc for a in coeffs[:-1])
    return [radius * complex(math.cos(2 * math.pi * k / n + 0.4), math.sin(2 * math.pi * k / n + 0.4))
            for k in range(n)]


def _aberth(coeffs, prec: int, max_iter: int | None = None):
    n = len(coeffs) - 1
    work = prec + 32
    with gmpy2.context(precision=work):
        cs = [a.to_mpc(work) for a in coeffs]
        dcs = [cs[k] * k for k in range(1, n + 1)]
        zs = [mpc(g) for g in _initial_guesses(coeffs, prec)]
        tol = mpfr(2) ** (-work + 8)
        max_iter = max_iter or (60 + 4 * work)
        for _ in range(max_iter):
            biggest = mpfr(0)
            for j in range(n):
                z = zs[j]
                pv = _horner(cs, z)
                if pv == 0:
                    continue
                dv = _horner(dcs, z)
                ratio = pv / dv if dv != 0 else mpc(1)
                s = mpc(0)
                for k in range(n):
                    if k != j:
                        diff = z - zs[k]
                        if diff != 0:
                            s += 1 / diff
                denom = 1 - ratio * s
                w = ratio / denom if denom != 0 else ratio
                zs[j] = z - w
                rel = abs(w) / max(mpfr(1), abs(zs[j]))
                if rel > biggest:
                    biggest = rel
            if biggest <= tol:
                break
        return zs


def _horner(cs, z):
    acc = cs[-1]
    for a in reversed(cs[:-1]):
        acc = acc * z + a
    return acc


def _ball_from_residual(coeffs, z, prec: int) -> Approx:
    """Error radius n*(|p(z)| + coefficient slack)/|p'(z)| around z."""
    n = len(coeffs) - 1
    work = prec + 32
    with gmpy2.context(precision=work):
        cs = [a.to_mpc(work) for a in coeffs]
        pv = _horner(cs, z)
        dv = _horner([cs[k] * k for k in range(1, n + 1)], z)
    slack = mpfr(0)
    dslack = mpfr(0)
    with _up():
        az = abs(z)
        for k, a in enumerate(coeffs):
            e = a.err if isinstance(a, Approx) else mpfr(0)
            if e:
                slack += e * az ** k
                if k:
                    dslack += k * e * az ** (k - 1)
        num = n * (abs(pv) + slack)
    with _down():
        den = abs(dv) - dslack
    if den <= 0:
        raise PrecisionError("derivative vanishes at an approximate root")
    with gmpy2.context(precision=prec):
        c = mpc(z)
    with _up():
        e = num / den + abs(c) * mpfr(2) ** (2 - prec) + mpfr(2) ** (-prec)
    return Approx(c, e, prec)


def _roots_approx(coeffs, prec: int):
    n = len(coeffs) - 1
    zs = _aberth(coeffs, prec)
    balls = []
    for z in zs:
        try:
            balls.append(_ball_from_residual(coeffs, z, prec))
        except PrecisionError:
            with gmpy2.context(precision=prec):
                c = mpc(z)
            balls.append(Approx(c, mpfr("inf"), prec))
    # merge overlapping discs into clusters
    clusters = [[b] for b in balls]
    merged = True
    while merged:
        merged = False
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                if _clusters_touch(clusters[i], clusters[j]):
                    clusters[i] = clusters[i] + clusters[j]
                    del clusters[j]
                    merged = True
                    break
            if merged:
                break
    out = []
    for cl in clusters:
        if len(cl) == 1:
            b = cl[0]
            if not gmpy2.is_finite(b.err):
                raise PrecisionExhausted("could not isolate a polynomial root")
            out.append((b, 1))
            continue
        m = len(cl)
        with gmpy2.context(precision=prec + 32):
            centre = sum((b.center for b in cl), mpc(0)) / m
        # an m-fold root is a simple root of the (m-1)-th derivative, which
        # pins the centre to full precision instead of ~1/m of the digits
        deriv = list(coeffs)
        for _ in range(m - 1):
            deriv = [deriv[k] * k for k in range(1, len(deriv))]
        centre = _newton_polish(deriv, centre, prec)
        try:
            ball = _ball_from_residual(deriv, centre, prec)
        except PrecisionError:
            raise PrecisionExhausted("could not isolate a root cluster")
        out.append((ball, m))
    if sum(m for _, m in out) != n:
        raise PrecisionError("root multiplicities do not add up")
    return out


def _newton_polish(coeffs, z, prec: int, steps: int = 60):
    work = prec + 32
    with gmpy2.context(precision=work):
        cs = [a.to_mpc(work) for a in coeffs]
        dcs = [cs[k] * k for k in range(1, len(cs))]
        for _ in range(steps):
            dv = _horner(dcs, z) if dcs else mpc(0)
            if dv == 0:
                break
            w = _horner(cs, z) / dv
            z = z - w
            if abs(w) <= mpfr(2) ** (-work + 4) * max(mpfr(1), abs(z)):
                break
    return z


def _clusters_touch(a, b):
    for x in a:
        for y in b:
            with _down():
                dist = abs(x.center - y.center)
            with _up():
                rad = x.err + y.err
            if dist <= rad:
                return True
    return False
