from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from conftest import CUSP, TWO_PARAM, X, Y, to_sympy
from polarinv.errors import (
    NonIntegerExponent,
    NotVanishingAtOrigin,
    PolySyntaxError,
    UnboundParameter,
)
from polarinv.polynomial import (
    BivarPoly,
    format_poly,
    mini_regular_check,
    parse_param_binding,
    parse_poly,
    parse_scalar,
    partials,
    resultant_x,
    squarefree_check,
    tangent_cone,
    upoly_order,
)
from polarinv.scalars import Exact

coef = st.fractions(min_value=-9, max_value=9, max_denominator=5)
monos = st.dictionaries(st.tuples(st.integers(0, 5), st.integers(0, 6)), coef.filter(bool), max_size=8)
polys = monos.map(lambda d: BivarPoly({k: Exact(v) for k, v in d.items()}))


# parsing -----------------------------------------------------------------


def test_parse_with_parameter():
    f = parse_poly(CUSP, {"t": 1})
    assert f == BivarPoly({(3, 0): Exact(1), (1, 10): Exact(-3), (0, 12): Exact(1)})


def test_parse_two_parameters():
    f = parse_poly(TWO_PARAM, {"b": 1, "c": 1})
    assert to_sympy(f) == X**3 + X**2 * Y**3 + Y**9 + X * Y**7


def test_cancelling_terms_give_zero():
    assert parse_poly("0*x + y - y").is_zero()


def test_imaginary_unit_and_fractions():
    f = parse_poly("(1/2 + i)*x^2 - 3/4*y")
    assert f.coeff(2, 0) == Exact(Fraction(1, 2), 1)
    assert f.coeff(0, 1) == Exact(Fraction(-3, 4))


def test_unary_minus_at_head_and_in_parens():
    assert parse_poly("-x + (-y)^2") == parse_poly("y^2 - x")


def test_missing_star_is_rejected():
    with pytest.raises(PolySyntaxError) as ei:
        parse_poly("3x")
    assert ei.value.pos == 1


def test_fractional_exponent_rejected():
    with pytest.raises(NonIntegerExponent):
        parse_poly("x^3/2")


def test_decimal_literal_rejected():
    with pytest.raises(PolySyntaxError):
        parse_poly("0.5*x")


def test_unbound_parameter():
    with pytest.raises(UnboundParameter) as ei:
        parse_poly("x^2 + t*y")
    assert ei.value.name == "t"


def test_param_binding_grammar():
    assert parse_param_binding("t=1/2") == ("t", Exact(Fraction(1, 2)))
    assert parse_param_binding("c = 2*i") == ("c", Exact(0, 2))
    assert parse_scalar("(1+i)^2") == Exact(0, 2)


@given(polys)
def test_format_parse_round_trip(f):
    assert parse_poly(format_poly(f)) == f


def test_format_order():
    assert format_poly(parse_poly(CUSP, {"t": 1})) == "x^3 - 3*x*y^10 + y^12"


# calculus ----------------------------------------------------------------


def test_partials_of_cusp_family():
    fx, fy = partials(parse_poly(CUSP, {"t": 1}))
    assert fx == parse_poly("3*x^2 - 3*y^10")
    assert fy == parse_poly("-30*x*y^9 + 12*y^11")


def test_partials_of_constant():
    fx, fy = partials(BivarPoly.const(5))
    assert fx.is_zero() and fy.is_zero()


def test_partial_x_of_two_param_family():
    fx, _ = partials(parse_poly(TWO_PARAM, {"b": 1, "c": 1}))
    assert fx == parse_poly("3*x^2 + 2*x*y^3 + y^7")


@given(polys)
def test_mixed_partials_commute(f):
    assert f.diff_x().diff_y() == f.diff_y().diff_x()


@given(polys)
def test_derivatives_match_sympy(f):
    assert to_sympy(f.diff_x()) == sympy.expand(sympy.diff(to_sympy(f), X))
    assert to_sympy(f.diff_y()) == sympy.expand(sympy.diff(to_sympy(f), Y))


@given(polys, polys)
def test_ring_operations_match_sympy(f, g):
    assert to_sympy(f * g) == sympy.expand(to_sympy(f) * to_sympy(g))
    assert to_sympy(f - g) == sympy.expand(to_sympy(f) - to_sympy(g))


@given(polys, coef.filter(bool))
def test_substitute_x_shear(f, lam):
    got = f.substitute_x(parse_poly(f"x + ({lam.numerator}/{lam.denominator})*y"))
    want = sympy.expand(to_sympy(f).subs(X, X + sympy.Rational(lam.numerator, lam.denominator) * Y))
    assert to_sympy(got) == want


# tangent cone ------------------------------------------------------------


def test_cone_of_cusp_family():
    cone = tangent_cone(parse_poly(CUSP, {"t": 1}))
    assert cone.k == 3
    assert cone.lines == [(Exact(0), 3)]
    assert cone.sigma_lines == [(Exact(0), 3)]


def test_cone_of_two_lines():
    cone = tangent_cone(parse_poly("x^2 - y^2"))
    assert cone.k == 2
    assert sorted((l.re, m) for l, m in cone.lines) == [(-1, 1), (1, 1)]
    assert cone.sigma_lines == []


def test_cone_with_imaginary_lines():
    cone = tangent_cone(parse_poly("x^2 + y^2"))
    assert sorted((l.im for l, _ in cone.lines)) == [-1, 1]
    assert all(l.re == 0 for l, _ in cone.lines)


def test_cone_requires_vanishing():
    with pytest.raises(NotVanishingAtOrigin):
        tangent_cone(parse_poly("1 + x"))


@given(polys)
def test_cone_multiplicities_sum_to_k(f):
    f = f * parse_poly("x + y") + parse_poly("x^3")
    if f.is_zero() or f.coeff(0, 0) != Exact(0) or not mini_regular_check(f):
        return
    cone = tangent_cone(f)
    assert sum(m for _, m in cone.lines) == cone.k
    Hk = f.homogeneous_part(cone.k)
    assert all(i + j == cone.k for i, j in Hk.terms)


# admissibility -----------------------------------------------------------


@pytest.mark.parametrize(
    "text,expected",
    [(CUSP.replace("t^2", "1"), True), ("y^2 + x^3", False), ("x^3 + x^2*y^3 + y^9 + x*y^7", True)],
)
def test_mini_regular(text, expected):
    assert mini_regular_check(parse_poly(text)) is expected


@pytest.mark.parametrize(
    "text,expected",
    [("(x - y)^2", False), ("x^3 - 3*x*y^10 + y^12", True), ("x^2 - y^3", True)],
)
def test_squarefree(text, expected):
    assert squarefree_check(parse_poly(text)) is expected


# resultants --------------------------------------------------------------


def test_resultant_sign_convention():
    # rows of f first in the Sylvester matrix
    assert resultant_x(parse_poly("x^2 - y"), parse_poly("x")) == [Exact(0), Exact(-1)]


@pytest.mark.parametrize("text,order", [("x^3 - 3*x*y^10 + y^12", 24), ("x^3 + x^2*y^3 + y^9 + x*y^7", 18)])
def test_resultant_order(text, order):
    f = parse_poly(text)
    assert upoly_order(resultant_x(f, f.diff_x())) == order


def _sylvester_det(f, g):
    """Independent Sylvester determinant, rows of f first."""
    pf = sympy.Poly(to_sympy(f), X).all_coeffs()
    pg = sympy.Poly(to_sympy(g), X).all_coeffs()
    n, m = len(pf) - 1, len(pg) - 1
    rows = [[0] * k + pf + [0] * (m - 1 - k) for k in range(m)]
    rows += [[0] * k + pg + [0] * (n - 1 - k) for k in range(n)]
    return sympy.expand(sympy.Matrix(rows).det(method="berkowitz"))


small_polys = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 4)), coef.filter(bool), max_size=5).map(
    lambda d: BivarPoly({k: Exact(v) for k, v in d.items()})
)


@given(small_polys, small_polys)
def test_resultant_matches_sylvester_determinant(f, g):
    if f.deg_x() < 1 or g.deg_x() < 1:
        return
    got = resultant_x(f, g)
    got_expr = sum(sympy.Rational(c.re.numerator, c.re.denominator) * Y**k for k, c in enumerate(got))
    want = _sylvester_det(f, g)
    assert sympy.expand(got_expr - want) == 0
    # sympy's own resultant agrees up to sign
    other = sympy.resultant(to_sympy(f), to_sympy(g), X)
    assert sympy.expand(got_expr - other) == 0 or sympy.expand(got_expr + other) == 0


def test_complex_coefficients_resultant():
    # Sylvester determinant of x^2 + i*y and 2x is 4*i*y
    f = parse_poly("x^2 + i*y")
    assert resultant_x(f, f.diff_x()) == [Exact(0), Exact(0, 4)]
