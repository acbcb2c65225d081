import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CUSP, DEGENERATE, TWO_PARAM
from polarinv.equivalence import (
    Decision,
    all_nth_roots,
    delta_equivalent,
    format_report,
    inv2_equivalent,
    witness_constants,
)
from polarinv.invariant import DeltaL, Leading, cstar_transform, inv2
from polarinv.options import Options
from polarinv.oracle import Scale, Shear, random_exact_scalar, template_germs, transform_germ
from polarinv.polynomial import parse_poly
from polarinv.scalars import ONE, ZERO, Exact, I, ZeroTest, default_eps, zero_test

F = Fraction


def I2(text, **params):
    return inv2(parse_poly(text, params), Options())


def has_constant(report, value, tol=F(1, 10**30)):
    for _, per_line in report.witnesses:
        for cs in per_line:
            if any(zero_test(c - value, tol) is ZeroTest.ZERO for c in cs):
                return True
    return False


# decisions on the families -------------------------------------------------


def test_cusp_family_t1_vs_t2_refuted():
    r = inv2_equivalent(I2(CUSP, t=1), I2(CUSP, t=2))
    assert r.decision is Decision.NOT_EQUIVALENT
    assert not r.witnesses
    (ref,) = r.refutations
    assert ref.constraints == ("c^12 = 1", "c^3 in {8,-8}")


def test_two_param_family_refuted():
    r = inv2_equivalent(I2(TWO_PARAM, b=1, c=1), I2(TWO_PARAM, b=2, c=1))
    assert r.decision is Decision.NOT_EQUIVALENT
    (ref,) = r.refutations
    assert ref.constraints == ("c^9 in {1,59/27}", "c in {62/59,-62/59}")


@pytest.mark.parametrize("text,params", [(CUSP, {"t": 1}), (TWO_PARAM, {"b": 1, "c": 1}), (DEGENERATE, {"t": 1})])
def test_scaling_by_two_recovers_two(text, params):
    f = parse_poly(text, params)
    r = inv2_equivalent(inv2(f, Options()), inv2(transform_germ(f, Scale(Exact(2))), Options()))
    assert r.decision is Decision.CONSISTENT
    assert has_constant(r, Exact(2))


@pytest.mark.parametrize("text,params", [(CUSP, {"t": 1}), (TWO_PARAM, {"b": 1, "c": 1})])
def test_decisions_stable_under_precision_doubling(text, params):
    f = parse_poly(text, params)
    g = transform_germ(f, Scale(Exact(3)))
    for prec in (256, 512):
        o = Options(prec=prec)
        assert inv2_equivalent(inv2(f, o), inv2(g, o)).decision is Decision.CONSISTENT


def test_refutation_stable_under_precision_doubling():
    for prec in (256, 512):
        o = Options(prec=prec)
        a = inv2(parse_poly(CUSP, {"t": 1}), o)
        b = inv2(parse_poly(CUSP, {"t": 2}), o)
        assert inv2_equivalent(a, b).decision is Decision.NOT_EQUIVALENT


def test_packet_count_mismatch():
    r = inv2_equivalent(I2("x^2 + y^2"), I2(CUSP, t=1))
    assert r.decision is Decision.NOT_EQUIVALENT
    assert r.refutations[0].line_pair == (-1, -1)
    assert any("multiplicities differ" in w for w in r.warnings)


def test_empty_invariants_are_consistent():
    r = inv2_equivalent(I2("x^2 + y^2"), I2("x^2 - y^2"))
    assert r.decision is Decision.CONSISTENT
    assert "no singular lines" in format_report(r)


def test_signature_mismatch_gives_no_witness():
    d1 = DeltaL(lam=ZERO, leading=(Leading(F(6), ONE, 1),), pairs=())
    d2 = DeltaL(lam=ZERO, leading=(Leading(F(7), ONE, 1),), pairs=())
    assert delta_equivalent(d1, d2) == []


def test_fractional_exponents_use_common_root():
    d1 = DeltaL(lam=ZERO, leading=(Leading(F(5, 2), ONE, 1),), pairs=())
    d2 = cstar_transform(d1, Exact(4))
    cs = witness_constants(delta_equivalent(d1, d2), default_eps(256))
    assert any(zero_test(c - Exact(4)) is ZeroTest.ZERO for c in cs)


def test_all_nth_roots_count_and_values():
    roots = all_nth_roots(Exact(16), 4, 256)
    assert len(roots) == 4
    assert {r for r in roots if isinstance(r, Exact)} >= {Exact(2)}
    assert all(zero_test(r**4 - Exact(16)) is ZeroTest.ZERO for r in roots)


def test_report_json_shape():
    r = inv2_equivalent(I2(CUSP, t=1), I2(CUSP, t=1))
    js = r.to_json()
    assert js["decision"] == "ConsistentWithEquivalence"
    assert js["witnesses"][0]["line_map"] == [[0, 0]]
    assert "1" in js["witnesses"][0]["c"][0]


# properties ----------------------------------------------------------------


germs = st.sampled_from([g.poly() for g in template_germs(10, seed=5)])


@settings(max_examples=10)
@given(germs)
def test_reflexive(f):
    I = inv2(f, Options())
    r = inv2_equivalent(I, I)
    assert r.decision is Decision.CONSISTENT
    if I.packets:
        assert has_constant(r, ONE, default_eps(256))


@settings(max_examples=10)
@given(germs, st.integers(0, 10**6))
def test_symmetric_with_inverse_witness(f, seed):
    c = random_exact_scalar(random.Random(seed))
    A = inv2(f, Options())
    B = inv2(transform_germ(f, Scale(c)), Options())
    fwd, back = inv2_equivalent(A, B), inv2_equivalent(B, A)
    assert fwd.decision is back.decision is Decision.CONSISTENT
    if A.packets:
        tol = F(1, 10**30)
        assert has_constant(fwd, c, tol)
        assert has_constant(back, c.inverse(), tol)


def test_packet_transform_by_imaginary_unit():
    d = I2(DEGENERATE, t=1).packets[0]
    ws = delta_equivalent(d, cstar_transform(d, I))
    assert any(zero_test(w.c - I) is ZeroTest.ZERO for w in ws)


def test_shear_keeps_invariant_with_witness_one():
    f = parse_poly(CUSP, {"t": 1})
    g = transform_germ(f, Shear(Exact(1)))
    r = inv2_equivalent(inv2(f, Options()), inv2(g, Options()))
    assert r.decision is Decision.CONSISTENT
    assert has_constant(r, ONE)
