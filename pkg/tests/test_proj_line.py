from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from mumford.errors import DegenerateConfiguration
from mumford.padic_field import INFINITE, padic
from mumford.proj_line import Moebius, ProjPoint, cross_ratio, dual_star, moebius_act, parse_point

from conftest import frac_val

P = 5


def pt(x, p=P):
    return ProjPoint.of(x, p)


INF = ProjPoint.infinity(P)

small = st.fractions(min_value=-50, max_value=50, max_denominator=30)
entries = st.integers(-30, 30)


matrices = (
    st.tuples(entries, entries, entries, entries)
    .filter(lambda m: m[0] * m[3] != m[1] * m[2])
    .map(lambda m: Moebius.from_rows([[m[0], m[1]], [m[2], m[3]]], P))
)


def test_moebius_examples():
    assert moebius_act(Moebius.from_rows([[5, 0], [0, 1]], P), pt(1)) == pt(5)
    assert Moebius.identity(P).act(pt(Fraction(3, 7))) == pt(Fraction(3, 7))
    assert Moebius.from_rows([[0, 1], [1, 0]], P).act(INF) == pt(0)


def test_dual_star_examples():
    assert dual_star(INF) == pt(0)
    assert dual_star(pt(0)) == INF
    z = padic(Fraction(2, 3), P)
    x = ProjPoint(padic(1, P), -z)
    assert dual_star(x) == pt(Fraction(2, 3))


def test_cross_ratio_examples():
    c = cross_ratio(pt(0), pt(1), INF, pt(5))
    assert c == padic(Fraction(1, 5), P) and c.valuation == -1
    assert cross_ratio(pt(3), pt(3), pt(1), pt(2)).valuation == INFINITE
    lhs = cross_ratio(pt(0), pt(1), INF, pt(2)) * cross_ratio(pt(0), pt(2), INF, pt(3))
    assert lhs == cross_ratio(pt(0), pt(1), INF, pt(3))


def test_cross_ratio_degenerate():
    with pytest.raises(DegenerateConfiguration):
        cross_ratio(pt(1), pt(2), pt(3), pt(1))


def test_parse_point_forms():
    assert parse_point("inf", P).is_infinity()
    assert parse_point("-3/10", P) == pt(Fraction(-3, 10))
    assert parse_point("[2:4]", P) == pt(Fraction(1, 2))
    assert parse_point("[1:0]", P).is_infinity()


def test_canonical_form():
    x = ProjPoint(padic(25, P), padic(5, P))
    assert x.x1 == padic(1, P) and x.x0 == padic(5, P)
    y = ProjPoint(padic(1, P), padic(50, P))
    assert y.x0 == padic(1, P)
    assert y == pt(Fraction(1, 50))


@given(matrices, matrices, small)
def test_group_action(g, h, x):
    z = pt(x)
    assert (g @ h).act(z) == g.act(h.act(z))


@given(matrices, small)
def test_star_equivariance(g, x):
    z = pt(x)
    assert dual_star(g.act(z)) == g.contragredient().act(dual_star(z))
    assert dual_star(dual_star(z)) == z


@given(matrices, small, small, small, small)
def test_cross_ratio_invariance(g, a1, z1, a2, z2):
    assume(len({a1, z1, a2, z2}) == 4)
    pts = [pt(x) for x in (a1, z1, a2, z2)]
    img = [g.act(x) for x in pts]
    c = cross_ratio(*pts)
    assert cross_ratio(*img) == c
    # oracle: the rational cross ratio
    want = (a1 - z1) * (a2 - z2) / ((a1 - z2) * (a2 - z1))
    assert c.valuation == frac_val(want, P)
