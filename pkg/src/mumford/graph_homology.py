"""Metric graphs, harmonic cochains, cycle pairings and harmonic measures on trees.

Graphs (MetricGraph here, FiniteTree in bt_tree.py) share one convention: the
undirected edge k gives the directed edges 2k and 2k+1, opposite to each
other.  A cochain is an integer per directed edge with c(2k+1) = -c(2k).
"""
import random

from .errors import EdgeOutsideWindow, NotABallUnion


class MetricGraph:
    """A finite connected graph with positive integer edge lengths.

    Loops and multiple edges are allowed.
    """

    def __init__(self, vertices, edges):
        self.vertices = list(vertices)
        self.edges = []
        for u, v, ell in edges:
            if not (isinstance(ell, int) and ell > 0):
                raise ValueError(f"edge length must be a positive integer, got {ell!r}")
            self.edges.append((u, v, ell))
        self.out = {i: [] for i in range(len(self.vertices))}
        for k, (u, v, _) in enumerate(self.edges):
            self.out[u].append(2 * k)
            self.out[v].append(2 * k + 1)

    @property
    def num_edges(self):
        return 2 * len(self.edges)

    def source(self, e):
        u, v, _ = self.edges[e // 2]
        return u if e % 2 == 0 else v

    def target(self, e):
        u, v, _ = self.edges[e // 2]
        return v if e % 2 == 0 else u

    def length(self, e):
        return self.edges[e // 2][2]

    def star(self, v):
        return list(self.out[v])

    def interior_nodes(self):
        return range(len(self.vertices))

    def betti_number(self):
        return len(self.edges) - len(self.vertices) + 1

    def total_length(self):
        return sum(ell for _, _, ell in self.edges)

    def to_networkx(self):
        import networkx as nx

        g = nx.MultiGraph()
        g.add_nodes_from(range(len(self.vertices)))
        for u, v, ell in self.edges:
            g.add_edge(u, v, length=ell)
        return g

    def is_isomorphic(self, other):
        """Isomorphism as weighted graphs (lengths must match)."""
        import networkx as nx
        from networkx.algorithms.isomorphism import categorical_multiedge_match

        if (len(self.vertices), sorted(e[2] for e in self.edges)) != (
            len(other.vertices),
            sorted(e[2] for e in other.edges),
        ):
            return False
        return nx.is_isomorphic(
            self.to_networkx(), other.to_networkx(), edge_match=categorical_multiedge_match("length", None)
        )

    def to_json(self):
        return {
            "vertices": len(self.vertices),
            "edges": [[u, v, ell] for u, v, ell in self.edges],
            "betti": self.betti_number(),
        }

    def to_dot(self, name="quotient", labels=None):
        lines = [f"graph {name} {{"]
        for i, x in enumerate(self.vertices):
            lab = labels[i] if labels else str(x)
            lines.append(f'  v{i} [label="{lab}"];')
        for u, v, ell in self.edges:
            lines.append(f'  v{u} -- v{v} [label="{ell}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


class Cochain:
    """Integer values on directed edges, antisymmetric under reversal."""

    __slots__ = ("graph", "values")

    def __init__(self, graph, values=None):
        self.graph = graph
        n = graph.num_edges
        if values is None:
            self.values = [0] * n
        else:
            self.values = [int(x) for x in values]
            if len(self.values) != n:
                raise ValueError("wrong number of values")
            for k in range(0, n, 2):
                if self.values[k] != -self.values[k + 1]:
                    raise ValueError("cochain is not antisymmetric")

    @classmethod
    def from_edges(cls, graph, assignment):
        """Build from {directed edge: value}, filling in the opposites."""
        c = cls(graph)
        for e, x in assignment.items():
            c.add(e, x)
        return c

    def add(self, e, x):
        self.values[e] += x
        self.values[e ^ 1] -= x

    def __getitem__(self, e):
        return self.values[e]

    def __add__(self, other):
        return Cochain(self.graph, [a + b for a, b in zip(self.values, other.values)])

    def __sub__(self, other):
        return Cochain(self.graph, [a - b for a, b in zip(self.values, other.values)])

    def __neg__(self):
        return Cochain(self.graph, [-a for a in self.values])

    def __mul__(self, k):
        return Cochain(self.graph, [k * a for a in self.values])

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, Cochain) and self.values == other.values

    def is_zero(self):
        return not any(self.values)

    def __repr__(self):
        return f"Cochain({self.values[0::2]})"


def star_sum(graph, c, v):
    return sum(c[e] for e in graph.star(v))


def validate_harmonic(graph, c):
    """Whether c sums to zero over the star of every interior vertex."""
    return all(star_sum(graph, c, v) == 0 for v in graph.interior_nodes())


def subtree_star(graph, nodes):
    """Edges leaving a set of vertices."""
    nodes = set(nodes)
    return [e for v in nodes for e in graph.star(v) if graph.target(e) not in nodes]


def h1_basis(graph):
    """Fundamental cycles of a BFS spanning tree, as harmonic cochains."""
    parent_edge = {0: None}
    order = [0]
    for v in order:
        for e in graph.star(v):
            t = graph.target(e)
            if t not in parent_edge:
                parent_edge[t] = e
                order.append(t)
    tree_edges = {e // 2 for e in parent_edge.values() if e is not None}

    def path_to_root(v):
        path = []
        while parent_edge[v] is not None:
            e = parent_edge[v]
            path.append(e ^ 1)
            v = graph.source(e)
        return path

    basis = []
    for k in range(len(graph.edges)):
        if k in tree_edges:
            continue
        z = Cochain(graph)
        z.add(2 * k, 1)
        u, v = graph.source(2 * k), graph.target(2 * k)
        # close the cycle: v -> root -> u
        for e in path_to_root(v):
            z.add(e, 1)
        for e in path_to_root(u):
            z.add(e, -1)
        basis.append(z)
    return basis


def cycle_pairing(graph, z1, z2):
    """Sum over undirected edges of z1(e) z2(e) length(e)."""
    return sum(z1[2 * k] * z2[2 * k] * ell for k, (_, _, ell) in enumerate(graph.edges))


def gram_matrix(graph, cycles):
    return [[cycle_pairing(graph, a, b) for b in cycles] for a in cycles]


def leading_minors(matrix):
    """Exact leading principal minors of an integer matrix."""
    from fractions import Fraction

    n = len(matrix)
    out = []
    for k in range(1, n + 1):
        m = [[Fraction(matrix[i][j]) for j in range(k)] for i in range(k)]
        det = Fraction(1)
        for col in range(k):
            piv = next((r for r in range(col, k) if m[r][col] != 0), None)
            if piv is None:
                det = Fraction(0)
                break
            if piv != col:
                m[col], m[piv] = m[piv], m[col]
                det = -det
            det *= m[col][col]
            for r in range(col + 1, k):
                f = m[r][col] / m[col][col]
                for j in range(col, k):
                    m[r][j] -= f * m[col][j]
        out.append(int(det))
    return out


# -- harmonic measures on finite trees -----------------------------------


def signed_point_measure(tree, a, b):
    """Cochain of mu_{a,b}: +1 on balls holding a but not b, -1 on the reverse.

    a and b are leaf indices of the tree.
    """
    c = Cochain(tree)
    for e in range(0, tree.num_edges, 2):
        ball = tree.ball_of_edge(e)
        x = (a in ball) - (b in ball)
        if x:
            c.add(e, x)
    return c


def _root(tree):
    interior = list(tree.interior_nodes())
    return interior[0] if interior else None


def ball_decomposition(tree, S):
    """Maximal decomposition of a set of leaves into edge balls."""
    S = _as_leaf_set(tree, S)
    root = _root(tree)
    if root is None:
        return sorted(e for e in range(tree.num_edges) if tree.ball_of_edge(e) <= S and tree.ball_of_edge(e))
    out = []

    def visit(e):
        ball = tree.ball_of_edge(e)
        if ball <= S:
            if ball:
                out.append(e)
            return
        if not (ball & S):
            return
        t = tree.target(e)
        for f in tree.star(t):
            if f != e ^ 1:
                visit(f)

    for e in tree.star(root):
        visit(e)
    return out


def random_decomposition(tree, S, rng=None):
    """A random refinement of the maximal decomposition of S."""
    rng = rng or random.Random(0)
    parts = list(ball_decomposition(tree, S))
    out = []
    while parts:
        e = parts.pop()
        t = tree.target(e)
        if not tree.is_leaf(t) and rng.random() < 0.5:
            parts.extend(f for f in tree.star(t) if f != e ^ 1)
        else:
            out.append(e)
    return sorted(out)


def _as_leaf_set(tree, S):
    out = set()
    for x in S:
        if isinstance(x, int):
            if not 0 <= x < tree.num_leaves:
                raise NotABallUnion(f"{x} is not a leaf")
            out.add(x)
        else:
            i = tree.node_of(x)
            if i is None or not tree.is_leaf(i):
                raise NotABallUnion(f"{x!r} is not a leaf of the tree")
            out.add(i)
    return frozenset(out)


def measure_of_decomposition(tree, c, edges):
    """Sum of c over edges whose balls must be pairwise disjoint."""
    seen = set()
    total = 0
    for e in edges:
        ball = tree.ball_of_edge(e)
        if seen & ball:
            raise NotABallUnion("balls overlap")
        seen |= ball
        total += c[e]
    return total


def measure_of(tree, c, S):
    """Mass of the leaf set S under the measure with cochain c."""
    return measure_of_decomposition(tree, c, ball_decomposition(tree, S))


# The measure of a word is oriented against the projected path from v0 to
# w.v0: for z -> qz it puts +1 on the ball around the repelling point.
MEASURE_SIGN = -1


def edge_unit_step(tree, k):
    """(directed edge, x, y): a unit step x -> y inside the undirected edge k."""
    from .bt_tree import TreePoint, step_toward

    u, v, _ = tree.edges[k]
    a, b = tree.nodes[u], tree.nodes[v]
    if isinstance(a, TreePoint):
        return 2 * k, a, step_toward(a, b)
    if isinstance(b, TreePoint):
        return 2 * k + 1, b, step_toward(b, a)
    x = tree.base_point()
    return 2 * k, x, step_toward(x, b)


def mu_gamma(group, quotient, tree, word):
    """Harmonic cochain on the tree of the measure attached to a group word.

    Each tree edge is evaluated on one unit step, projected to the quotient
    graph; edges off the tree of the limit set raise EdgeOutsideWindow.
    """
    cycle = quotient.cycle_of(word)
    c = Cochain(tree)
    for k in range(len(tree.edges)):
        e, x, y = edge_unit_step(tree, k)
        try:
            q = quotient.project_step(x, y)
        except KeyError:
            raise EdgeOutsideWindow(f"tree edge {k} does not project to the quotient") from None
        if cycle[q]:
            c.add(e, MEASURE_SIGN * cycle[q])
    return c
