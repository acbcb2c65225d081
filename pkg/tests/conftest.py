from fractions import Fraction

import pytest
import sympy
from hypothesis import HealthCheck, settings

from polarinv.options import Options
from polarinv.polynomial import BivarPoly, parse_poly
from polarinv.scalars import Exact

settings.register_profile(
    "default",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("default")

CUSP = "x^3 - 3*t^2*x*y^10 + y^12"
TWO_PARAM = "x^3 + b*x^2*y^3 + y^9 + c*x*y^7"
DEGENERATE = "x^3 - 3*t^2*x*y^4 + y^6"

X, Y = sympy.symbols("x y")


def to_sympy(f: BivarPoly):
    """Independent representation for cross-checks."""
    expr = 0
    for (i, j), c in f.items():
        assert isinstance(c, Exact)
        coef = sympy.Rational(c.re.numerator, c.re.denominator) + sympy.I * sympy.Rational(
            c.im.numerator, c.im.denominator
        )
        expr += coef * X**i * Y**j
    return sympy.expand(expr)


def sympy_scalar(c: Exact):
    return sympy.Rational(c.re.numerator, c.re.denominator) + sympy.I * sympy.Rational(c.im.numerator, c.im.denominator)


def q(text) -> Fraction:
    return Fraction(text)


@pytest.fixture(scope="session")
def opts():
    return Options()


@pytest.fixture(scope="session")
def cusp():
    return parse_poly(CUSP, {"t": 1})


@pytest.fixture(scope="session")
def two_param():
    return parse_poly(TWO_PARAM, {"b": 1, "c": 1})


@pytest.fixture(scope="session")
def degenerate():
    return parse_poly(DEGENERATE, {"t": 1})


ACCEPTANCE: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
