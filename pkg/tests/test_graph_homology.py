import random

import pytest
from hypothesis import given, strategies as st

from mumford.bt_tree import build_tree
from mumford.errors import EdgeOutsideWindow, NotABallUnion
from mumford.graph_homology import (
    MEASURE_SIGN,
    Cochain,
    MetricGraph,
    ball_decomposition,
    cycle_pairing,
    gram_matrix,
    h1_basis,
    leading_minors,
    measure_of,
    measure_of_decomposition,
    mu_gamma,
    random_decomposition,
    signed_point_measure,
    star_sum,
    subtree_star,
    validate_harmonic,
)
from mumford.proj_line import ProjPoint

P = 5


def pt(x):
    return ProjPoint.of(x, P)


def random_tree(rng, max_leaves=12):
    n = rng.randint(2, max_leaves)
    xs = rng.sample(range(-150, 151), n)
    leaves = [pt(x) for x in xs]
    if rng.random() < 0.5:
        leaves[-1] = ProjPoint.infinity(P)
    return build_tree(leaves)


def random_measure(tree, rng):
    """Random integer combination of point-mass differences, plus the masses it puts on leaves."""
    n = tree.num_leaves
    c = Cochain(tree)
    mass = [0] * n
    for _ in range(rng.randint(1, 4)):
        a, b = rng.sample(range(n), 2)
        k = rng.randint(-3, 3)
        c = c + k * signed_point_measure(tree, a, b)
        mass[a] += k
        mass[b] -= k
    return c, mass


def connected_interior_sets(tree, rng, count):
    """Random connected sets of interior vertices, grown from a random start."""
    interior = list(tree.interior_nodes())
    out = []
    for _ in range(count):
        start = rng.choice(interior)
        nodes = {start}
        for _ in range(rng.randint(0, len(interior))):
            frontier = [tree.target(e) for v in nodes for e in tree.star(v)]
            frontier = [t for t in frontier if not tree.is_leaf(t) and t not in nodes]
            if not frontier:
                break
            nodes.add(rng.choice(frontier))
        out.append(nodes)
    return out


def test_metric_graph_basics():
    G = MetricGraph(["a", "b"], [(0, 1, 1), (0, 1, 1), (0, 0, 3)])
    assert G.betti_number() == 2
    assert G.total_length() == 5
    assert G.source(1) == 1 and G.target(1) == 0
    assert sorted(G.star(0)) == [0, 2, 4, 5]
    with pytest.raises(ValueError):
        MetricGraph(["a"], [(0, 0, 0)])


def test_isomorphism_respects_lengths():
    A = MetricGraph([0, 1], [(0, 1, 1), (0, 1, 2)])
    B = MetricGraph([0, 1], [(1, 0, 2), (1, 0, 1)])
    C = MetricGraph([0, 1], [(0, 1, 1), (0, 1, 1)])
    assert A.is_isomorphic(B)
    assert not A.is_isomorphic(C)


def test_cochain_antisymmetry():
    G = MetricGraph([0], [(0, 0, 2)])
    c = Cochain.from_edges(G, {0: 3})
    assert c.values == [3, -3]
    with pytest.raises(ValueError):
        Cochain(G, [1, 1])


def test_h1_basis_and_gram_of_theta_graph():
    # two vertices joined by three edges of lengths 1, 2, 3
    G = MetricGraph([0, 1], [(0, 1, 1), (0, 1, 2), (0, 1, 3)])
    basis = h1_basis(G)
    assert len(basis) == 2
    assert all(validate_harmonic(G, z) for z in basis)
    gram = gram_matrix(G, basis)
    assert gram == [[gram[0][0], gram[0][1]], [gram[0][1], gram[1][1]]]
    assert all(m > 0 for m in leading_minors(gram))


def test_cycle_pairing_brute_force():
    G = MetricGraph([0, 1], [(0, 1, 2), (0, 1, 3), (1, 0, 5)])
    z1 = Cochain.from_edges(G, {0: 1, 2: -1})
    z2 = Cochain.from_edges(G, {0: 1, 4: 1})
    assert validate_harmonic(G, z1) and validate_harmonic(G, z2)
    # only edge 0 is shared, traversed the same way
    assert cycle_pairing(G, z1, z2) == 2
    assert cycle_pairing(G, z1, z1) == 5


def test_leading_minors_examples():
    assert leading_minors([[2, 0], [0, 2]]) == [2, 4]
    assert leading_minors([[1, 2], [2, 1]]) == [1, -3]
    assert leading_minors([[0, 1], [1, 0]]) == [0, -1]


def test_signed_point_measure_example():
    L = [pt(0), pt(1), ProjPoint.infinity(P)]
    T = build_tree(L)
    c = signed_point_measure(T, 0, 2)
    assert validate_harmonic(T, c)
    assert measure_of(T, c, [0]) == 1
    assert measure_of(T, c, [2]) == -1
    assert measure_of(T, c, [0, 1, 2]) == 0


def test_overlapping_balls_rejected():
    T = build_tree([pt(0), pt(1), pt(2), ProjPoint.infinity(P)])
    g = next(iter(T.interior_nodes()))
    e = T.star(g)[0]
    c = signed_point_measure(T, 0, 1)
    with pytest.raises(NotABallUnion):
        measure_of_decomposition(T, c, [e, e ^ 1, e])
    with pytest.raises(NotABallUnion):
        measure_of(T, c, [99])


def test_ball_decomposition_is_maximal():
    T = build_tree([pt(x) for x in (0, 5, 10, 1, 2)])
    S = [T.node_of(pt(x)) for x in (0, 5, 10)]
    parts = ball_decomposition(T, S)
    assert len(parts) == 1
    assert T.ball_of_edge(parts[0]) == frozenset(S)


@given(st.integers(0, 10**6))
def test_measure_matches_point_masses(seed):
    rng = random.Random(seed)
    T = random_tree(rng)
    c, mass = random_measure(T, rng)
    S = [i for i in range(T.num_leaves) if rng.random() < 0.5]
    assert measure_of(T, c, S) == sum(mass[i] for i in S)


@given(st.integers(0, 10**6))
def test_decompositions_agree(seed):
    rng = random.Random(seed)
    T = random_tree(rng)
    c, _ = random_measure(T, rng)
    S = [i for i in range(T.num_leaves) if rng.random() < 0.6]
    d1 = random_decomposition(T, S, random.Random(seed + 1))
    d2 = random_decomposition(T, S, random.Random(seed + 2))
    assert set().union(*[T.ball_of_edge(e) for e in d1]) == set(S)
    assert measure_of_decomposition(T, c, d1) == measure_of_decomposition(T, c, d2)


@given(st.integers(0, 10**6))
def test_total_mass_and_star_sums(seed):
    rng = random.Random(seed)
    T = random_tree(rng)
    c, _ = random_measure(T, rng)
    assert measure_of(T, c, range(T.num_leaves)) == 0
    assert validate_harmonic(T, c)
    if T.interior:
        for nodes in connected_interior_sets(T, rng, 4):
            assert sum(c[e] for e in subtree_star(T, nodes)) == 0


def test_star_sum_detects_non_harmonic():
    T = build_tree([pt(0), pt(1), ProjPoint.infinity(P)])
    g = next(iter(T.interior_nodes()))
    c = Cochain.from_edges(T, {T.star(g)[0]: 1})
    assert star_sum(T, c, g) == 1
    assert not validate_harmonic(T, c)


def test_mu_gamma_tate(tate5):
    from mumford.schottky import quotient_graph

    Q = quotient_graph(tate5, 3)
    T = build_tree(Q.window(4))
    c = mu_gamma(tate5, Q, T, "g1")
    assert validate_harmonic(T, c)
    inf = T.node_of(ProjPoint.infinity(P))
    # the mass sits on the repelling end of z -> 5z
    assert measure_of(T, c, [inf]) == -MEASURE_SIGN
    assert mu_gamma(tate5, Q, T, "g1^-1") == -c


def test_mu_gamma_genus_two(g2, g2_quotient):
    T = build_tree(g2_quotient.window(4))
    c1 = mu_gamma(g2, g2_quotient, T, "g1")
    c2 = mu_gamma(g2, g2_quotient, T, "g2")
    assert validate_harmonic(T, c1) and validate_harmonic(T, c2)
    assert mu_gamma(g2, g2_quotient, T, "g1*g2") == c1 + c2
    assert measure_of(T, c1, range(T.num_leaves)) == 0


def test_mu_gamma_outside_window(g2, g2_quotient):
    T = build_tree([pt(2), pt(3), pt(7)])
    with pytest.raises(EdgeOutsideWindow):
        mu_gamma(g2, g2_quotient, T, "g1")
