import random
from fractions import Fraction

import pytest

from mumford.bt_tree import act as tree_act
from mumford.bt_tree import build_tree, distance
from mumford.errors import NotConverged, PoleHit
from mumford.graph_homology import edge_unit_step, mu_gamma
from mumford.padic_field import padic
from mumford.proj_line import ProjPoint
from mumford.schottky import GroupWord, SchottkyGroup, enumerate_words, escape_depth
from mumford.theta import (
    ThetaSpec,
    automorphy_factor,
    automorphy_factor_detail,
    default_cap,
    edge_slope,
    period,
    period_spec,
    theta_quotient,
    theta_quotient_detail,
)

from conftest import G2_ROWS

P = 5


def at(G, x):
    return ProjPoint.of(Fraction(x), G.prime, G.work_precision)


def brute_theta(G, p, q, z, w, N):
    """Truncated product over all reduced words of length <= N, in exact rationals."""
    out = Fraction(1)
    for word in enumerate_words(G, N):
        a, b, c, d = (x.to_fraction() for x in G.matrix(word).entries())
        gp, gq = (a * p + b) / (c * p + d), (a * q + b) / (c * q + d)
        out *= (z - gp) * (w - gq) / ((z - gq) * (w - gp))
    return out


def domain_points(G, rng, count):
    out = []
    while len(out) < count:
        x = Fraction(rng.randint(-200, 200), rng.choice([1, 2, 3, 7, 11]))
        z = at(G, x)
        if escape_depth(G, z) is not None and all(not (z == y) for y in out):
            out.append(z)
    return out


def test_default_cap():
    tate = SchottkyGroup.from_rows([[[5, 0], [0, 1]]], P)
    assert default_cap(tate) == tate.work_precision + 2
    assert default_cap(SchottkyGroup.from_rows(G2_ROWS, P)) == 16


def test_tate_closed_form(tate5):
    # theta(1 - 5; z) / theta(1 - 5; z0) telescopes to z0 / z
    S = period_spec(tate5, 1)
    rng = random.Random(3)
    for z, z0 in zip(domain_points(tate5, rng, 5), domain_points(tate5, rng, 5)):
        if z == z0:
            continue
        got = theta_quotient(S, z, z0)
        assert got.agreement(z0.finite() / z.finite()) >= 20


@pytest.mark.parametrize("q", [5, 25])
def test_tate_period_is_q(q):
    G = SchottkyGroup.from_rows([[[q, 0], [0, 1]]], P)
    Q = period(G, 1, 1)
    assert Q.agreement(padic(q, P)) >= 20
    assert Q.precision >= 20


def test_genus_two_against_brute_product(g2):
    S = period_spec(g2, 2, digits=12)
    p, q = (x.finite().to_fraction() for x in S.pairs[0])
    z, w = Fraction(3), Fraction(4, 3)
    th = theta_quotient(S, at(g2, z), at(g2, w))
    agree = [th.agreement(padic(brute_theta(g2, p, q, z, w, N), P, 40)) for N in range(1, 6)]
    assert agree == sorted(agree)
    assert agree[-1] >= 10


def test_quotient_is_a_cocycle(g2):
    S = period_spec(g2, 1, digits=12)
    a, b, c = (at(g2, x) for x in ("3", "4/3", "-2"))
    ab, bc, ac = theta_quotient(S, a, b), theta_quotient(S, b, c), theta_quotient(S, a, c)
    assert (ab * bc).agreement(ac) >= 11
    assert theta_quotient(S, a, a).agreement(padic(1, P)) >= 20


def test_automorphy_factor_is_constant(g2):
    S = period_spec(g2, 1, digits=10)
    m = g2.matrix("g2")
    vals = []
    for x in ("3", "-2", "4/3", "7"):
        z = at(g2, x)
        vals.append(theta_quotient(S, z, m.act(z)))
    assert all(v.agreement(vals[0]) >= 10 for v in vals)
    d = automorphy_factor_detail(S, "g2")
    assert d.value.agreement(vals[0]) >= 10


def test_pole_hit(tate5):
    S = period_spec(tate5, 1)
    p = S.pairs[0][0]
    with pytest.raises(PoleHit):
        theta_quotient(S, tate5.act((1, 1), p), at(tate5, 3))


def test_not_converged(g2):
    S = period_spec(g2, 1, truncation=3, digits=20)
    with pytest.raises(NotConverged):
        theta_quotient_detail(S, at(g2, 3), at(g2, -2))


def test_trivial_divisor(g2):
    S = ThetaSpec(g2, [(at(g2, 3), at(g2, 3))])
    assert S.pairs == []
    assert theta_quotient(S, at(g2, 2), at(g2, 7)).agreement(padic(1, P)) >= 20


def test_automorphy_multiplicative(g2):
    S = period_spec(g2, 2, digits=10)
    c1, c2, c12 = (automorphy_factor(S, w) for w in ("g1", "g2", "g1*g2"))
    assert (c1 * c2).agreement(c12) >= 9


def test_edge_slopes_match_measure(g2, g2_quotient):
    T = build_tree(g2_quotient.window(6))
    v0 = g2_quotient.base
    for word in ("g1", "g2"):
        c = mu_gamma(g2, g2_quotient, T, word)
        checked = 0
        for k, (u, v, _) in enumerate(T.edges):
            if T.is_leaf(u) or T.is_leaf(v):
                continue
            e, x, y = edge_unit_step(T, k)
            if max(distance(v0, x), distance(v0, y)) > 3:
                continue
            assert edge_slope(g2, word, x, y, T.leaves) == c[e]
            m = g2.matrix(GroupWord([2]))
            assert edge_slope(g2, word, tree_act(m, x), tree_act(m, y), [m.act(a) for a in T.leaves]) == c[e]
            checked += 1
        assert checked >= 10
