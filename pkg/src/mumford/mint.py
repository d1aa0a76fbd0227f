"""Multiplicative integrals of rational functions against harmonic measures.

The integrand attached to a degree zero divisor D = sum m_p p is
f_D(t) = prod (t - p)^{m_p}, computed with homogeneous brackets so that
infinity needs no special case; the constant of proportionality cancels
against any measure of total mass zero.
"""
from dataclasses import dataclass

from .errors import (
    DepthInsufficient,
    NotDegreeZero,
    SupportMeetsEvaluationPoint,
)
from .graph_homology import Cochain
from .padic_field import PadicNumber
from .proj_line import ProjPoint, _det
from .bt_tree import FiniteTree, distance, retract, walk


class DegreeZeroDivisor:
    """Finite formal sum of points of P^1 with integer multiplicities summing to 0."""

    def __init__(self, terms):
        merged = []
        for pt, m in terms:
            m = int(m)
            for i, (q, k) in enumerate(merged):
                if q == pt:
                    merged[i] = (q, k + m)
                    break
            else:
                merged.append((pt, m))
        self.terms = [(q, m) for q, m in merged if m]
        if sum(m for _, m in self.terms) != 0:
            raise NotDegreeZero(f"degree {sum(m for _, m in self.terms)}")

    @classmethod
    def difference(cls, z, z0):
        """The divisor z - z0."""
        return cls([(z, 1), (z0, -1)])

    @classmethod
    def from_json(cls, items, prime, precision):
        from .proj_line import parse_point

        return cls([(parse_point(p, prime, precision), int(m)) for p, m in items])

    def support(self):
        return [q for q, _ in self.terms]

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        return DegreeZeroDivisor(self.terms + other.terms)

    def __neg__(self):
        return DegreeZeroDivisor([(q, -m) for q, m in self.terms])

    def __sub__(self, other):
        return self + (-other)

    def translate(self, g):
        """Image under a Moebius transformation."""
        return DegreeZeroDivisor([(g.act(q), m) for q, m in self.terms])

    def __repr__(self):
        return " + ".join(f"{m}*[{q.to_text()}]" for q, m in self.terms) or "0"


def _fd_parts(D, t):
    """Numerator and denominator of f_D(t), as products of brackets."""
    num = den = None
    for q, m in D.terms:
        b = _det(t, q)
        if b.is_zero():
            raise SupportMeetsEvaluationPoint(f"{q.to_text()} meets the evaluation point")
        f = b ** abs(m)
        if m > 0:
            num = f if num is None else num * f
        else:
            den = f if den is None else den * f
    return num, den


def _fd(D, t):
    if D.is_zero():
        return None
    num, den = _fd_parts(D, t)
    return num / den


def evaluate_fD(D, q, b0):
    """f_D(q) normalised so that f_D(b0) = 1."""
    if D.is_zero():
        return PadicNumber.one(q.prime)
    return _fd(D, q) / _fd(D, b0)


def _cover(T, depth, base):
    """Depth-n cover: list of (directed edge, leaves in its ball)."""
    if not T.interior:
        return [(e, sorted(T.ball_of_edge(e))) for e in (0, 1)]
    if base is None:
        root = next(iter(T.interior_nodes()))
    else:
        root = base if isinstance(base, int) else T.node_of(base)
        if root is None or T.is_leaf(root):
            raise DepthInsufficient("the base point is not an interior vertex of the tree")
    dep, parent = T.rooted(root)
    groups = {}
    for leaf in range(T.num_leaves):
        node, e = leaf, parent[leaf]
        # climb until the edge straddles the requested depth
        while dep[T.source(e)] >= depth:
            node = T.source(e)
            e = parent[node]
            if e is None:
                raise DepthInsufficient("depth must be at least 1")
        groups.setdefault(e, []).append(leaf)
    return sorted(groups.items())


def riemann_integral(T, c, D, depth, base=None):
    """Product of f_D(t_e)^{c(e)} over the edges e of the depth-n cover.

    t_e is the leaf of smallest key in the ball of e; depth is measured from
    base (an interior vertex of T, default the first one).
    """
    if depth < 1:
        raise DepthInsufficient("depth must be at least 1")
    if D.is_zero():
        return PadicNumber.one(T.leaves[0].prime)
    num = den = None
    for e, leaves in _cover(T, depth, base):
        k = c[e]
        if not k:
            continue
        t = min((T.leaves[i] for i in leaves), key=lambda x: x.key())
        a, b = _fd_parts(D, t)
        if k < 0:
            a, b, k = b, a, -k
        a, b = a**k, b**k
        num = a if num is None else num * a
        den = b if den is None else den * b
    if num is None:
        return PadicNumber.one(T.leaves[0].prime)
    return num / den


def _potential(T, c, x, root, dep, parent):
    """Sum of c along the path from the root to the tree point x (unit steps)."""
    d = distance(T.nodes[root], x)
    for leaf in range(T.num_leaves):
        if walk(T.nodes[root], T.leaves[leaf], d) == x:
            break
    else:
        raise ValueError("point is not on the tree")
    path = []
    node = leaf
    while parent[node] is not None:
        path.append(parent[node])
        node = T.source(parent[node])
    total = 0
    for e in reversed(path):
        start = dep[T.source(e)]
        if start >= d:
            break
        end = dep[T.target(e)]
        total += c[e] * (min(end, d) - start)
    return total


def valuation_of_integral(T, c, D, base=None):
    """Exact valuation of the integral: retract D onto T and sum c along paths."""
    if D.is_zero():
        return 0
    if not T.interior:
        # one edge between two ends: potential = signed displacement along edge 0
        b = T.nodes[T.target(0)]
        x0 = T.base_point()
        total = 0
        for q, m in D.terms:
            r = retract(q, T.leaves)
            if isinstance(r, ProjPoint):
                raise SupportMeetsEvaluationPoint("divisor meets the leaf set")
            s = distance(x0, r)
            sign = 1 if walk(x0, b, s) == r else -1
            total += m * sign * s * c[0]
        return total
    root = next(iter(T.interior_nodes())) if base is None else T.node_of(base)
    dep, parent = T.rooted(root)
    total = 0
    for q, m in D.terms:
        r = retract(q, T.leaves)
        if isinstance(r, ProjPoint):
            raise SupportMeetsEvaluationPoint("divisor meets the leaf set")
        total += m * _potential(T, c, r, root, dep, parent)
    return total


def mu_tilde_rational(T, D):
    """Cochain of the measure sum m_p delta_p of a divisor supported on leaves.

    For u = (z - a)/(z - b) this is mu_{a,b}: +1 on balls holding the zero
    a, -1 on balls holding the pole b; it satisfies the Poisson formula
    u(z)/u(z0) = integral over z - z0.
    """
    idx = []
    for q, m in D.terms:
        i = T.node_of(q)
        if i is None or not T.is_leaf(i):
            raise ValueError(f"{q.to_text()} is not a leaf of the tree")
        idx.append((i, m))
    c = Cochain(T)
    for k in range(len(T.edges)):
        ball = T.ball_of_edge(2 * k)
        x = sum(m for i, m in idx if i in ball)
        if x:
            c.add(2 * k, x)
    return c


def rational_value(u, z):
    """u(z) up to a constant factor, for u given by its divisor of zeros and poles."""
    return _fd(u, z)


def poisson_check(T, u, z, z0, depth, base=None):
    """Both sides of u(z)/u(z0) = integral over z - z0 against mu~(u)."""
    lhs = rational_value(u, z) / rational_value(u, z0)
    rhs = riemann_integral(T, mu_tilde_rational(T, u), DegreeZeroDivisor.difference(z, z0), depth, base)
    return lhs, rhs


@dataclass
class IntegralResult:
    value: PadicNumber
    digits: int
    depth: int
    tree: FiniteTree = None
    cochain: Cochain = None
    base: object = None


def integrate_window(Q, word, D, digits=12, start=4, step=2, max_depth=24):
    """Integral of f_D against the measure of a word, on growing windows.

    Windows of the tree of the limit set around the base vertex are refined
    until two successive depths agree on the requested digits.
    """
    from .graph_homology import mu_gamma
    from .bt_tree import build_tree

    prev = None
    depth = start
    best = None
    while depth <= max_depth:
        T = build_tree(Q.window(depth))
        c = mu_gamma(Q.group, Q, T, word)
        base = Q.base if T.interior and T.node_of(Q.base) is not None else None
        val = riemann_integral(T, c, D, depth, base)
        if prev is not None:
            agree = min(prev.agreement(val), val.precision, Q.group.precision)
            best = IntegralResult(val.with_precision(max(agree, 1)), agree, depth, T, c, base)
            if agree >= digits:
                return best
        prev = val
        depth += step
    raise DepthInsufficient(f"only {best.digits if best else 0} digits by depth {max_depth}")


def push_forward(T, c, g):
    """The tree spanned by g(L) and the image measure g_* c on it.

    The directed edge whose far side holds the leaves B goes to the edge
    whose far side holds g(B).
    """
    from .bt_tree import build_tree

    images = [g.act(x) for x in T.leaves]
    T2 = build_tree(images)
    digits = min(z.precision for z in images)
    where = {z.key(digits): i for i, z in enumerate(T2.leaves)}
    index = {i: where[z.key(digits)] for i, z in enumerate(images)}
    c2 = Cochain(T2)
    for k in range(len(T.edges)):
        ball = [index[i] for i in T.ball_of_edge(2 * k)]
        e = T2.edge_with_ball(ball)
        if e is None:
            raise ValueError("image tree does not match")
        if c[2 * k]:
            c2.add(e, c[2 * k])
    return T2, c2
