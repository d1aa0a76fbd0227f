"""The Bruhat-Tits tree of PGL2(Q_p) and finite subtrees spanned by point sets.

Vertices are closed balls B(x, p^-m), written alpha(x, p^-m), with integer
radius exponent m; the distance between nested balls is the difference of
their exponents.  Ends of the tree are points of P^1, represented by
ProjPoint.
"""
from collections import defaultdict
from fractions import Fraction

from .errors import EqualPoints, NotDistinct, PrecisionExhausted, SharedEndpoint
from .padic_field import DEFAULT_PRECISION, GUARD_DIGITS, INFINITE, PadicNumber
from .proj_line import ProjPoint


class TreePoint:
    """The type-II point alpha(center, p^-radius_exp).

    The center is reduced modulo p^radius_exp to its smallest representative,
    so equal balls have identical fields and hash alike.
    """

    __slots__ = ("prime", "center", "radius_exp", "_key")

    def __init__(self, center, radius_exp):
        p = center.prime
        m = int(radius_exp)
        self.prime = p
        self.radius_exp = m
        if center.valuation >= m:
            self.center = PadicNumber.zero(p)
            self._key = (m,)
            return
        v = center.valuation
        if center.absolute_precision < m:
            raise PrecisionExhausted(f"center known only mod p^{center.absolute_precision}, radius needs p^{m}")
        u = center.unit % p ** (m - v)
        self.center = PadicNumber(p, v, u, max(DEFAULT_PRECISION + GUARD_DIGITS, m - v))
        self._key = (m, v, u)

    def key(self):
        return self._key

    def __eq__(self, other):
        return isinstance(other, TreePoint) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __lt__(self, other):
        return self._key < other._key

    def up(self):
        return TreePoint(self.center, self.radius_exp - 1)

    def center_point(self):
        return ProjPoint.of(self.center, self.prime)

    def label(self):
        return f"α({_short_center(self)}, {self.prime}^{-self.radius_exp})"

    def __repr__(self):
        return self.label()


def _short_center(x):
    """Signed residue of the center modulo p^radius_exp, as text."""
    c = x.center
    if c.is_zero():
        return "0"
    k = x.radius_exp - c.valuation
    mod = x.prime**k
    u = c.unit % mod
    if u > mod // 2:
        u -= mod
    val = u * Fraction(x.prime) ** c.valuation
    return str(val)


def gauss_point(prime):
    return TreePoint(PadicNumber.zero(prime), 0)


def _val(x):
    return x.valuation


def join(x0, x1):
    """The point x0 v x1 = alpha(x0, |x0 - x1|) for distinct finite points."""
    a, b = x0.finite(), x1.finite()
    d = a - b
    if d.is_zero():
        raise EqualPoints("join of equal points")
    return TreePoint(a, d.valuation)


def median(x0, x1, x2):
    """The unique tree point lying on all three apartments between the ends."""
    pts = [x0, x1, x2]
    infs = [x for x in pts if x.is_infinity()]
    if len(infs) > 1:
        raise NotDistinct("infinity repeated")
    if infs:
        a, b = [x for x in pts if not x.is_infinity()]
        try:
            return join(a, b)
        except EqualPoints as exc:
            raise NotDistinct(str(exc)) from None
    zs = [x.finite() for x in pts]
    best = None
    for i, j in ((0, 1), (0, 2), (1, 2)):
        d = zs[i] - zs[j]
        if d.is_zero():
            raise NotDistinct("points coincide to precision")
        if best is None or d.valuation > best[0]:
            best = (d.valuation, i)
    return TreePoint(zs[best[1]], best[0])


def _meet_exp(a, b):
    """Exponent of the smallest ball containing both balls."""
    m = min(a.radius_exp, b.radius_exp)
    d = a.center - b.center
    if d.is_zero():
        return m
    return min(m, d.valuation)


def distance(a, b):
    k = _meet_exp(a, b)
    return (a.radius_exp - k) + (b.radius_exp - k)


def _contains(ball, z):
    """Whether the end z lies in the closed ball of the tree point."""
    if z.is_infinity():
        return False
    d = z.finite() - ball.center
    return d.is_zero() or d.valuation >= ball.radius_exp


def walk(b, target, n):
    """The point at distance n from b along the geodesic toward target.

    target is an end (ProjPoint) or a TreePoint; for a TreePoint n must not
    exceed the distance.
    """
    c, m = b.center, b.radius_exp
    if isinstance(target, TreePoint):
        k = _meet_exp(b, target)
        up = m - k
        if n <= up:
            return TreePoint(c, m - n)
        if n > up + target.radius_exp - k:
            raise ValueError("walked past the target")
        return TreePoint(target.center, k + n - up)
    if target.is_infinity():
        return TreePoint(c, m - n)
    z = target.finite()
    d = z - c
    k = INFINITE if d.is_zero() else d.valuation
    if k >= m:
        return TreePoint(z, m + n)
    up = m - k
    if n <= up:
        return TreePoint(c, m - n)
    return TreePoint(z, k + n - up)


def step_toward(b, target):
    """The neighbour of b in the direction of target (end or TreePoint)."""
    if isinstance(target, TreePoint) and target == b:
        raise EqualPoints("no direction toward the point itself")
    return walk(b, target, 1)


def act(g, x):
    """Image of a tree point under a Moebius transformation."""
    p = x.prime
    c = ProjPoint.of(x.center, p)
    c2 = ProjPoint.of(x.center + PadicNumber(p, x.radius_exp, 1, DEFAULT_PRECISION + GUARD_DIGITS), p)
    return median(g.act(c), g.act(c2), g.act(ProjPoint.infinity(p)))


def on_apartment(x, a, b):
    """Whether the tree point x lies on the apartment between ends a and b."""
    return step_toward(x, a) != step_toward(x, b)


def project_to_apartment(x, a, b):
    """Nearest point to x on the apartment between the ends a and b."""
    p = x.prime
    da, db = step_toward(x, a), step_toward(x, b)
    cands = [ProjPoint.infinity(p)] + [
        ProjPoint.of(x.center + PadicNumber(p, x.radius_exp, k, DEFAULT_PRECISION) if k else x.center, p)
        for k in range(p)
    ]
    for u in cands:
        du = step_toward(x, u)
        if du != da and du != db:
            return median(a, b, u)
    raise PrecisionExhausted("no free direction")  # impossible for odd p


def retract(z, L):
    """Retraction of the end z onto the subtree spanned by the finite set L.

    Returns z itself when z belongs to L, otherwise a TreePoint.
    """
    for y in L:
        if y == z:
            return z
    finite = [y.finite() for y in L if not y.is_infinity()]
    has_inf = len(finite) < len(L)
    y0 = finite[0]
    if has_inf:
        diam = None
    else:
        diam = min(_val(y - y0) for y in finite[1:])
    if z.is_infinity():
        return TreePoint(y0, diam)
    x = z.finite()
    s = max(_val(x - y) for y in finite)
    if diam is None or s >= diam:
        return TreePoint(x, s)
    return TreePoint(y0, diam)


def _distinct_check(L):
    # keys truncated to the common precision detect points equal to precision
    digits = min(x.precision for x in L)
    keys = set()
    for x in L:
        k = x.key(digits)
        if k in keys:
            raise NotDistinct("points coincide to precision")
        keys.add(k)


class FiniteTree:
    """Minimal model of the subtree spanned by a finite set of ends.

    Nodes 0..len(leaves)-1 are the leaves (ProjPoint), later nodes are the
    interior vertices (TreePoint).  Edge k joins edges[k] = (u, v, length);
    the directed edge 2k runs u -> v and 2k+1 runs v -> u.  Leaf edges have
    length INFINITE.
    """

    def __init__(self, leaves, interior, edges):
        self.leaves = list(leaves)
        self.interior = list(interior)
        self.edges = list(edges)
        self.nodes = self.leaves + self.interior
        self.out = defaultdict(list)
        for k, (u, v, _) in enumerate(self.edges):
            self.out[u].append(2 * k)
            self.out[v].append(2 * k + 1)
        self._index = {x.key(): i + len(self.leaves) for i, x in enumerate(self.interior)}
        self._balls = {}

    @property
    def num_leaves(self):
        return len(self.leaves)

    @property
    def num_edges(self):
        """Number of directed edges."""
        return 2 * len(self.edges)

    def is_leaf(self, node):
        return node < len(self.leaves)

    def interior_nodes(self):
        return range(len(self.leaves), len(self.nodes))

    def vertices(self):
        return range(len(self.nodes))

    def source(self, e):
        u, v, _ = self.edges[e // 2]
        return u if e % 2 == 0 else v

    def target(self, e):
        u, v, _ = self.edges[e // 2]
        return v if e % 2 == 0 else u

    def length(self, e):
        return self.edges[e // 2][2]

    @staticmethod
    def reverse(e):
        return e ^ 1

    def star(self, node):
        """Outgoing directed edges at a node."""
        return list(self.out[node])

    def node_of(self, x):
        """Node id of a TreePoint or leaf point, or None."""
        if isinstance(x, TreePoint):
            return self._index.get(x.key())
        for i, y in enumerate(self.leaves):
            if y == x:
                return i
        return None

    def valence(self, node):
        return len(self.out[node])

    def ball_of_edge(self, e):
        """Leaf indices in the component of target(e) once e is removed."""
        if e in self._balls:
            return self._balls[e]
        seen = {self.source(e)}
        stack = [self.target(e)]
        found = []
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            if self.is_leaf(n):
                found.append(n)
            for f in self.out[n]:
                t = self.target(f)
                if t not in seen:
                    stack.append(t)
        ball = frozenset(found)
        self._balls[e] = ball
        self._balls.setdefault(e ^ 1, frozenset(range(len(self.leaves))) - ball)
        return ball

    def edge_with_ball(self, ball):
        """Directed edge whose ball is exactly the given leaf set, or None."""
        if not hasattr(self, "_by_ball"):
            self._by_ball = {self.ball_of_edge(e): e for e in range(self.num_edges)}
        return self._by_ball.get(frozenset(ball))

    def contains_point(self, x):
        """Whether the TreePoint x lies on the tree."""
        return self.locate(x) is not None

    def locate(self, x):
        """('node', id) or ('edge', directed id, distance from source) or None."""
        n = self.node_of(x)
        if n is not None:
            return ("node", n, 0)
        for k, (u, v, _) in enumerate(self.edges):
            a, b = self.nodes[u], self.nodes[v]
            if isinstance(a, TreePoint) and isinstance(b, TreePoint):
                if distance(a, x) + distance(x, b) == distance(a, b):
                    return ("edge", 2 * k, distance(a, x))
            elif isinstance(a, TreePoint):
                if walk(a, b, distance(a, x)) == x:
                    return ("edge", 2 * k, distance(a, x))
            elif isinstance(b, TreePoint):
                if walk(b, a, distance(b, x)) == x:
                    return ("edge", 2 * k + 1, distance(b, x))
            elif on_apartment(x, a, b):
                return ("edge", 2 * k, None)
        return None

    def step_edge(self, x, y):
        """Directed edge of the tree containing the unit step x -> y."""
        ball = [i for i, leaf in enumerate(self.leaves) if step_toward(x, leaf) == y]
        e = self.edge_with_ball(ball)
        if e is None:
            raise ValueError("step does not lie on the tree")
        return e

    def rooted(self, root):
        """Depth of every node from an interior root and the edge reaching it."""
        depth = {root: 0}
        parent = {root: None}
        stack = [root]
        while stack:
            n = stack.pop()
            for e in self.out[n]:
                t = self.target(e)
                if t not in depth:
                    depth[t] = depth[n] + self.length(e)
                    parent[t] = e
                    stack.append(t)
        return depth, parent

    def base_point(self):
        """A deterministic point on the tree: first interior vertex, or a point of the apartment."""
        if self.interior:
            return self.interior[0]
        a, b = self.leaves
        return project_to_apartment(gauss_point(a.prime), a, b)

    def to_dot(self, name="tree"):
        lines = [f"graph {name} {{"]
        for i, x in enumerate(self.nodes):
            label = x.to_text() if isinstance(x, ProjPoint) else x.label()
            lines.append(f'  n{i} [label="{label}"];')
        for u, v, ell in self.edges:
            lab = "inf" if ell == INFINITE else str(ell)
            lines.append(f'  n{u} -- n{v} [label="{lab}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_tree(L):
    """Minimal model of T(L) by recursive splitting into residue classes.

    Every interior vertex produced is the median of three leaves, and has
    valence at least three.
    """
    leaves = list(L)
    if len(leaves) < 2:
        raise ValueError("need at least two points")
    _distinct_check(leaves)
    finite = [i for i, x in enumerate(leaves) if not x.is_infinity()]
    inf = [i for i, x in enumerate(leaves) if x.is_infinity()]
    vals = {i: leaves[i].finite() for i in finite}
    interior, edges = [], []

    def make(idx):
        if len(idx) == 1:
            return idx[0], None, []
        base = vals[idx[0]]
        m = min(_val(vals[i] - base) for i in idx[1:])
        groups = {}
        for i in idx:
            groups.setdefault(TreePoint(vals[i], m + 1).key(), []).append(i)
        node = TreePoint(base, m)
        children = []
        for g in groups.values():
            children.append(make(g))
        return None, node, children

    def emit(item):
        leaf, node, children = item
        if node is None:
            return leaf, None
        nid = len(leaves) + len(interior)
        interior.append(node)
        for ch in children:
            cid, ctp = emit(ch)
            ell = INFINITE if ctp is None else ctp.radius_exp - node.radius_exp
            edges.append((nid, cid, ell))
        return nid, node

    if len(finite) == 1:
        edges.append((finite[0], inf[0], INFINITE))
        return FiniteTree(leaves, interior, edges)
    root = make(finite)
    if inf or len(root[2]) > 2:
        rid, _ = emit(root)
        if inf:
            edges.append((rid, inf[0], INFINITE))
        return FiniteTree(leaves, interior, edges)
    # two residue classes and no infinity: the top ball is not a branch point
    top = root[1]
    ends = []
    for ch in root[2]:
        cid, ctp = emit(ch)
        ends.append((cid, INFINITE if ctp is None else ctp.radius_exp - top.radius_exp))
    (a, la), (b, lb) = ends
    edges.append((a, b, la + lb))
    return FiniteTree(leaves, interior, edges)


def apartment_pairing(a1, a2, z1, z2):
    """Signed length of the overlap of the apartments A(a1,a2) and A(z1,z2).

    Positive when a1 -> a2 and z1 -> z2 run the same way along the overlap.
    """
    for a in (a1, a2):
        for z in (z1, z2):
            if a == z:
                raise SharedEndpoint("apartments share an end")
    q1 = median(a1, z1, z2)
    q2 = median(a2, z1, z2)
    if q1 == q2:
        return 0
    d = distance(q1, q2)
    return d if step_toward(q1, q2) == step_toward(q1, z2) else -d
