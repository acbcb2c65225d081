from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CUSP
from polarinv.invariant import (
    DeltaL,
    Excluded,
    Exclusion,
    Inv2,
    PairData,
    cstar_transform,
    delta_L,
    format_packet,
    inv2,
    pair_data,
)
from polarinv.options import Options
from polarinv.oracle import random_exact_scalar, template_germs
from polarinv.polar import polar_arcs
from polarinv.polynomial import parse_poly
from polarinv.scalars import ONE, ZERO, Exact, I, ZeroTest, zero_test

F = Fraction


def leading(d):
    return sorted((e.h0, e.a0.re, e.mult) for e in d.leading)


def pairs(d):
    return sorted((p.l0, p.m, p.nu.re) for p in d.pairs)


def same_packet(d1, d2):
    """Equal exponents and zero-tested equal coefficients, in canonical order."""
    items1 = [(e.h0, e.mult, e.a0) for e in d1.leading] + [(p.l0, p.m, p.nu) for p in d1.pairs]
    items2 = [(e.h0, e.mult, e.a0) for e in d2.leading] + [(p.l0, p.m, p.nu) for p in d2.pairs]
    if len(items1) != len(items2) or zero_test(d1.lam - d2.lam) is not ZeroTest.ZERO:
        return False
    return all(a[:2] == b[:2] and zero_test(a[2] - b[2]) is ZeroTest.ZERO for a, b in zip(items1, items2))


# pair data -----------------------------------------------------------------


def test_pair_data_cusp_family(cusp, opts):
    A, B = polar_arcs(cusp, opts)
    assert pair_data(cusp, B, A, opts) == PairData(alpha=1, beta=0, l0=F(12), delta=F(5), m=F(15), nu=Exact(-4))


def test_pair_data_two_param_family(two_param, opts):
    A, B = polar_arcs(two_param, opts)
    got = {(p.l0, p.delta, p.m, p.nu) for p in (pair_data(two_param, A, B, opts), pair_data(two_param, B, A, opts))}
    assert got == {(F(9), F(3), F(10), Exact(F(-18, 31))), (F(9), F(3), F(10), Exact(F(18, 31)))}


def test_pair_data_degenerate_family_excluded(degenerate, opts):
    A, B = polar_arcs(degenerate, opts)
    assert pair_data(degenerate, A, B, opts) == Excluded(Exclusion.NO_DIFFERENCE)


def test_pair_data_same_arc_is_same_canyon(cusp, opts):
    A, _ = polar_arcs(cusp, opts)
    assert pair_data(cusp, A, A, opts) == Excluded(Exclusion.SAME_CANYON)


def test_pair_data_contact_one(opts):
    # two transversal tangential pieces meeting with contact 1 are excluded
    f = parse_poly("x^3 - 3*x*y^2 + y^5")
    arcs = [a for a in polar_arcs(f, opts)]
    for A in arcs:
        for B in arcs:
            if A.id != B.id and A.canyon != B.canyon and A.h0 == B.h0:
                assert pair_data(f, A, B, opts) == Excluded(Exclusion.CONTACT_ONE)


# packets -------------------------------------------------------------------


def test_packet_of_cusp_family(cusp, opts):
    (d,) = inv2(cusp, opts).packets
    assert d.lam == ZERO
    assert leading(d) == [(12, 1, 1), (12, 1, 1)]
    assert pairs(d) == [(12, 15, -4), (12, 15, 4)]
    assert format_packet(d) == "{y^12, y^12; (12, (-4)*y^15), (12, (4)*y^15)}"


def test_packet_of_cusp_family_t2(opts):
    (d,) = inv2(parse_poly(CUSP, {"t": 2}), opts).packets
    assert pairs(d) == [(12, 15, -32), (12, 15, 32)]


def test_packet_of_two_param_family(two_param, opts):
    (d,) = inv2(two_param, opts).packets
    assert leading(d) == [(9, 1, 1), (9, F(31, 27), 1)]
    assert pairs(d) == [(9, 10, F(-18, 31)), (9, 10, F(18, 31))]


def test_packet_of_degenerate_family(degenerate, opts):
    (d,) = inv2(degenerate, opts).packets
    assert leading(d) == [(6, -1, 1), (6, 3, 1)]
    assert d.pairs == ()


def test_empty_singular_locus(opts):
    I2 = inv2(parse_poly("x^2 + y^2"), opts)
    assert I2.packets == () and I2.k == 2


def test_delta_L_on_non_singular_line_is_empty(cusp, opts):
    d = delta_L(cusp, ONE, polar_arcs(cusp, opts), opts)
    assert d.leading == () and d.pairs == ()


# the rescaling action ------------------------------------------------------


def test_cstar_by_two_matches_scaled_germ(cusp, opts):
    (d,) = inv2(cusp, opts).packets
    t = cstar_transform(d, Exact(2))
    assert leading(t) == [(12, 4096, 1), (12, 4096, 1)]
    assert pairs(t) == [(12, 15, -32), (12, 15, 32)]
    # f(2x, 2y) computed directly gives the transformed packet
    (direct,) = inv2(parse_poly("8*x^3 - 6144*x*y^10 + 4096*y^12"), opts).packets
    assert same_packet(direct, t)


def test_cstar_by_i_on_degenerate_family(degenerate, opts):
    (d,) = inv2(degenerate, opts).packets
    assert leading(cstar_transform(d, I)) == [(6, -3, 1), (6, 1, 1)]


def test_cstar_identity(two_param, opts):
    (d,) = inv2(two_param, opts).packets
    assert cstar_transform(d, ONE) == d


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_cstar_inverse_round_trip(seed):
    import random

    d = inv2(parse_poly(CUSP, {"t": 1}), Options()).packets[0]
    c = random_exact_scalar(random.Random(seed))
    back = cstar_transform(cstar_transform(d, c), c.inverse())
    for x, y in zip(back.leading + back.pairs, d.leading + d.pairs):
        a = x.a0 if hasattr(x, "a0") else x.nu
        b = y.a0 if hasattr(y, "a0") else y.nu
        assert zero_test(a - b) is ZeroTest.ZERO


# properties over generated germs -------------------------------------------


germs = st.sampled_from([g.poly() for g in template_germs(15, seed=11)])


@settings(max_examples=15)
@given(germs)
def test_pair_invariants(f):
    I2 = inv2(f, Options())
    for d in I2.packets:
        assert all(zero_test(e.a0) is ZeroTest.NONZERO for e in d.leading)
        by_id = {(p.alpha, p.beta): p for p in d.pairs}
        for (a, b), p in by_id.items():
            assert p.l0 < p.m < p.l0 + p.delta - 1
            assert zero_test(p.nu) is ZeroTest.NONZERO
            q = by_id[(b, a)]
            assert q.m == p.m and zero_test(q.nu + p.nu) is ZeroTest.ZERO
        arcs = {a.id: a for a in I2.arcs}
        assert all(arcs[p.alpha].canyon != arcs[p.beta].canyon for p in d.pairs)


@settings(max_examples=10)
@given(germs)
def test_inv2_json_round_trip(f):
    I2 = inv2(f, Options())
    back = Inv2.from_json(I2.to_json())
    assert back.k == I2.k
    assert len(back.packets) == len(I2.packets)
    assert all(same_packet(a, b) for a, b in zip(I2.packets, back.packets))
    assert all(same_packet(DeltaL.from_json(d.to_json()), d) for d in I2.packets)


def test_longer_truncation_keeps_coefficients(two_param):
    """Doubling precision and term caps leaves every packet coefficient unchanged."""
    a = inv2(two_param, Options()).packets[0]
    b = inv2(two_param, Options(prec=512, max_terms=Options().max_terms * 2)).packets[0]
    assert a == b


@pytest.mark.parametrize("text", ["x^3 - 3*x*y^10 + y^12", "x^3 + x^2*y^3 + y^9 + x*y^7"])
def test_pair_json_round_trip(text, opts):
    for p in inv2(parse_poly(text), opts).packets[0].pairs:
        assert PairData.from_json(p.to_json()) == p


@pytest.mark.parametrize("b,c", [(1, 1), (2, 1), (1, 2), (3, -1), (F(1, 2), 5), (-1, 3)])
def test_two_param_family_closed_form(b, c):
    """Leading data {(4b^3/27 + 1), 1} and nu = -+18bc/(4b^3 + 27) across the family."""
    (d,) = inv2(parse_poly("x^3 + b*x^2*y^3 + y^9 + c*x*y^7", {"b": b, "c": c}), Options()).packets
    b, c = F(b), F(c)
    assert sorted(e.a0.re for e in d.leading) == sorted([F(4, 27) * b**3 + 1, F(1)])
    nu = -18 * b * c / (4 * b**3 + 27)
    assert sorted(p.nu.re for p in d.pairs) == sorted([nu, -nu])
    assert {p.m for p in d.pairs} == {10}
