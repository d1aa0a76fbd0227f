"""Schottky groups: generators, reduced words, ping-pong certificates, limit
set approximations and the quotient metric graph of the tree by the group.
"""
from dataclasses import dataclass
from itertools import groupby
import re

from .errors import (
    DegenerateConfiguration,
    PrecisionExhausted,
    FreeActionViolated,
    IdentityWord,
    NoPingPongCertificate,
    NotASquare,
    NotHyperbolic,
    NotStabilized,
)
from .graph_homology import Cochain, MetricGraph, cycle_pairing
from .padic_field import DEFAULT_PRECISION, GUARD_DIGITS
from .proj_line import Moebius, ProjPoint
from .bt_tree import (
    TreePoint,
    _short_center,
    act as tree_act,
    distance,
    gauss_point,
    median,
    project_to_apartment,
    step_toward,
    walk,
)
from .padic_field import hensel_sqrt


# -- words ----------------------------------------------------------------


def _letter_key(s):
    return (abs(s), s < 0)


def _reduce(letters):
    out = []
    for s in letters:
        if s == 0:
            raise ValueError("0 is not a letter")
        if out and out[-1] == -s:
            out.pop()
        else:
            out.append(s)
    return tuple(out)


class GroupWord:
    """A reduced word in the generators.

    Letter +i stands for the i-th generator (1-based), -i for its inverse.
    The word (s1, ..., sn) is the matrix product S1 S2 ... Sn, so sn acts
    first on points.
    """

    __slots__ = ("letters",)

    def __init__(self, letters=()):
        self.letters = _reduce(letters)

    @classmethod
    def parse(cls, text):
        """Parse "g1*g2^-1", "g1 g2^-1", "g1^3" or "1" (identity)."""
        if isinstance(text, GroupWord):
            return text
        if isinstance(text, (list, tuple)):
            return cls(text)
        s = str(text).strip()
        if s in ("", "1", "e"):
            return cls()
        letters = []
        for tok in re.split(r"[\s*·]+", s):
            m = re.fullmatch(r"g(\d+)(?:\^(-?\d+))?", tok)
            if not m or int(m.group(1)) < 1:
                raise ValueError(f"bad word token {tok!r}")
            i, k = int(m.group(1)), int(m.group(2) or 1)
            letters.extend([i if k > 0 else -i] * abs(k))
        return cls(letters)

    def inverse(self):
        return GroupWord(-s for s in reversed(self.letters))

    def __mul__(self, other):
        return GroupWord(self.letters + other.letters)

    def __pow__(self, k):
        base = self if k >= 0 else self.inverse()
        return GroupWord(base.letters * abs(k))

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def is_identity(self):
        return not self.letters

    def __eq__(self, other):
        return isinstance(other, GroupWord) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def sort_key(self):
        return (len(self.letters), [_letter_key(s) for s in self.letters])

    def __str__(self):
        if not self.letters:
            return "1"
        parts = []
        for s, run in groupby(self.letters):
            k = len(list(run)) * (1 if s > 0 else -1)
            parts.append(f"g{abs(s)}" if k == 1 else f"g{abs(s)}^{k}")
        return "*".join(parts)

    __repr__ = __str__


def compose(u, w):
    """Reduced product of two letter tuples."""
    return _reduce(u + w)


def invert(u):
    return tuple(-s for s in reversed(u))


# -- hyperbolic elements ----------------------------------------------------


@dataclass(frozen=True)
class FixedData:
    attractive: ProjPoint
    repulsive: ProjPoint
    translation_length: int
    multiplier: object  # eigenvalue ratio, valuation = translation_length


def _eigenvector(g, lam):
    a, b, c, d = g.entries()
    cands = [(b, lam - a), (lam - d, c)]
    best = min(cands, key=lambda xy: min(xy[0].valuation, xy[1].valuation))
    return ProjPoint(*best)


def analyze_element(g):
    """Fixed points and translation length of a hyperbolic matrix."""
    tr, det = g.trace(), g.det()
    disc = tr * tr - 4 * det
    if disc.is_zero():
        raise NotHyperbolic("parabolic: the eigenvalues coincide")
    try:
        s = hensel_sqrt(disc)
    except NotASquare:
        raise NotHyperbolic("eigenvalues are not in Q_p") from None
    plus, minus = tr + s, tr - s
    # the sum without cancellation gives the eigenvalue of larger size
    big = (plus if plus.valuation <= minus.valuation else minus) / 2
    small = det / big
    if big.valuation == small.valuation:
        raise NotHyperbolic("eigenvalues have equal absolute value")
    return FixedData(
        attractive=_eigenvector(g, big),
        repulsive=_eigenvector(g, small),
        translation_length=small.valuation - big.valuation,
        multiplier=small / big,
    )


# -- the group ----------------------------------------------------------------


class Disk:
    """Closed disk of P^1 seen from the tree: the ends not in one direction at an apex."""

    __slots__ = ("apex", "outward")

    def __init__(self, apex, outward):
        self.apex, self.outward = apex, outward

    def contains(self, z):
        return step_toward(self.apex, z) != self.outward

    def disjoint(self, other):
        a, b = self.apex, other.apex
        if a == b:
            return False
        return step_toward(a, b) == self.outward and step_toward(b, a) == other.outward

    def inside(self, other):
        a, b = self.apex, other.apex
        if a == b:
            return self.outward == other.outward
        return step_toward(a, b) == self.outward and step_toward(b, a) != other.outward

    def describe(self):
        """Human readable ball: |z - c| <= p^-m, or |z - c| >= p^-m."""
        p, m = self.apex.prime, self.apex.radius_exp
        if self.outward == self.apex.up():
            return {"ball": f"|z - {_short_center(self.apex)}| <= {p}^{-m}"}
        return {"ball": f"|z - {_short_center(self.outward)}| >= {p}^{-m}"}

    def __repr__(self):
        return f"Disk({self.apex!r}, away from {self.outward!r})"


@dataclass
class PingPongCertificate:
    disks: dict  # letter -> Disk

    def to_json(self):
        out = []
        for s in sorted(self.disks, key=_letter_key):
            d = self.disks[s]
            name = f"g{s}" if s > 0 else f"g{-s}^-1"
            out.append({"letter": name, "apex": d.apex.label(), **d.describe()})
        return out


class SchottkyGroup:
    """A free group generated by hyperbolic matrices, verified by ping-pong."""

    def __init__(self, generators, precision=DEFAULT_PRECISION, guard=GUARD_DIGITS, verify=True):
        gens = list(generators)
        if not gens:
            raise ValueError("need at least one generator")
        self.prime = gens[0].prime
        self.precision = precision
        self.work_precision = precision + guard
        self.generators = gens
        self.fixed = [analyze_element(g) for g in gens]
        self._mats = {(): Moebius.identity(self.prime, self.work_precision)}
        for i, g in enumerate(gens, start=1):
            self._mats[(i,)] = g
            self._mats[(-i,)] = g.inverse()
        self.certificate = verify_ping_pong(self) if verify else None

    @classmethod
    def from_rows(cls, rows_list, prime, precision=DEFAULT_PRECISION, guard=GUARD_DIGITS, verify=True):
        gens = [Moebius.from_rows(r, prime, precision + guard) for r in rows_list]
        return cls(gens, precision, guard, verify)

    @property
    def genus(self):
        return len(self.generators)

    @property
    def letters(self):
        return [s for i in range(1, self.genus + 1) for s in (i, -i)]

    def matrix(self, word):
        """Matrix of a word (GroupWord, text or letter tuple), cached."""
        if isinstance(word, str):
            word = GroupWord.parse(word)
        u = word.letters if isinstance(word, GroupWord) else tuple(word)
        m = self._mats.get(u)
        if m is None:
            m = self._mats[u[:1]] @ self.matrix(u[1:])
            self._mats[u] = m
        return m

    def act(self, word, x):
        """Action of a word on a ProjPoint or a TreePoint."""
        m = self.matrix(word)
        if isinstance(x, TreePoint):
            return tree_act(m, x)
        return m.act(x)

    def fixed_points(self):
        out = []
        for f in self.fixed:
            out += [f.attractive, f.repulsive]
        return out

    def attracting(self, s):
        f = self.fixed[abs(s) - 1]
        return f.attractive if s > 0 else f.repulsive


def enumerate_words(G, N):
    """All reduced words of length <= N in shortlex order."""
    if N < 0:
        raise ValueError("N must be >= 0")
    letters = sorted(G.letters, key=_letter_key)
    out = [GroupWord()]
    shell = [()]
    for _ in range(N):
        nxt = []
        for w in shell:
            for s in letters:
                if w and w[-1] == -s:
                    continue
                nxt.append(w + (s,))
        shell = nxt
        out.extend(GroupWord(w) for w in shell)
    return out


def word_count(g, N):
    if g == 1:
        return 2 * N + 1
    return 1 + 2 * g * ((2 * g - 1) ** N - 1) // (2 * g - 2)


# -- ping-pong ------------------------------------------------------------------


def _axis_point(origin, toward, away, t):
    return walk(origin, toward, t) if t >= 0 else walk(origin, away, -t)


def _candidates(G, i):
    """Disk pairs for generator i, placed on its axis; most balanced first."""
    f = G.fixed[i - 1]
    ell = f.translation_length
    zp, zm = f.attractive, f.repulsive
    o = project_to_apartment(gauss_point(G.prime), zp, zm)
    out = []
    for gap in range(ell, 0, -1):
        tps = sorted(range(-ell, gap + ell + 1), key=lambda t: (abs(2 * t - gap), -t))
        for tp in tps:
            tm = gap - tp
            bp = _axis_point(o, zp, zm, tp)
            bm = _axis_point(o, zp, zm, -tm)
            dp = Disk(bp, step_toward(bp, zm))
            dm = Disk(bm, step_toward(bm, zp))
            out.append((dp, dm))
    return out


def _pair_ok(G, i, dp, dm):
    if not dp.disjoint(dm):
        return False
    g, ginv = G.matrix((i,)), G.matrix((-i,))
    zp, zm = G.fixed[i - 1].attractive, G.fixed[i - 1].repulsive
    # g maps the complement of the open disk at the repelling end into dp
    a = tree_act(g, dm.apex)
    if not Disk(a, step_toward(a, zm)).inside(dp):
        return False
    b = tree_act(ginv, dp.apex)
    return Disk(b, step_toward(b, zp)).inside(dm)


def verify_ping_pong(G, budget=20000):
    """Find pairwise disjoint disks D_s with s(P^1 - open D_{s^-1}) inside D_s."""
    cands = [[c for c in _candidates(G, i) if _pair_ok(G, i, *c)] for i in range(1, G.genus + 1)]
    for i, c in enumerate(cands, start=1):
        if not c:
            raise NoPingPongCertificate(f"no disk pair works for generator {i}")
    chosen = []
    nodes = [0]

    def search(k):
        if k == len(cands):
            return True
        for dp, dm in cands[k]:
            nodes[0] += 1
            if nodes[0] > budget:
                return False
            if all(d.disjoint(e) for pair in chosen for e in pair for d in (dp, dm)):
                chosen.append((dp, dm))
                if search(k + 1):
                    return True
                chosen.pop()
        return False

    if not search(0):
        raise NoPingPongCertificate("no pairwise disjoint choice of disks")
    disks = {}
    for i, (dp, dm) in enumerate(chosen, start=1):
        disks[i], disks[-i] = dp, dm
    return PingPongCertificate(disks)


# -- limit set ---------------------------------------------------------------


def _orbit_shells(G, x, N):
    """Yield (letters, point) for w.x over reduced words of length <= N."""
    letters = sorted(G.letters, key=_letter_key)
    shell = [((), x)]
    yield from shell
    for _ in range(N):
        nxt = []
        for w, y in shell:
            for s in letters:
                if w and w[0] == -s:
                    continue
                nxt.append(((s,) + w, G.act((s,), y)))
        shell = nxt
        yield from shell


def limit_set_approx(G, N):
    """Orbit of the generator fixed points under words of length <= N."""
    seen = {}
    for z in G.fixed_points():
        for _, y in _orbit_shells(G, z, N):
            seen.setdefault(y.key(G.precision), y)
    return [seen[k] for k in sorted(seen)]


# -- quotient graph --------------------------------------------------------------


def base_vertex(G):
    f = G.fixed[0]
    if G.genus == 1:
        return project_to_apartment(gauss_point(G.prime), f.attractive, f.repulsive)
    return median(f.attractive, f.repulsive, G.fixed[1].attractive)


class QuotientGraph:
    """The finite metric graph T_Gamma / Gamma with the data to project onto it.

    Orbit representatives come from a Dirichlet fundamental set around the
    base vertex v0; boundary ties are broken by the smallest key.  Every
    representative c carries its neighbours in the tree spanned by the limit
    set, and for each neighbour n the word u with u.n a representative.
    """

    def __init__(self, G, depth):
        if depth < 1 and G.genus >= 2:
            raise ValueError("depth must be >= 1")
        self.group = G
        self.depth = depth
        self.base = base_vertex(G)
        self.limit_points = limit_set_approx(G, depth)
        self._orbit = self._base_orbit(2 * depth)
        self._rep = {}
        self._steps = {}
        self._canon = {}
        self._build_fundamental_set()
        self._build_graph()

    # orbit of v0 ------------------------------------------------------------

    def _base_orbit(self, n):
        G, v0 = self.group, self.base
        out = []
        for w, y in _orbit_shells(G, v0, max(n, 2)):
            if w and y == v0:
                raise FreeActionViolated(f"{GroupWord(w)} fixes the base vertex")
            out.append((distance(y, v0), w, y))
        out.sort(key=lambda t: (t[0], len(t[1]), [_letter_key(s) for s in t[1]]))
        return out

    def _nearest(self, y):
        """Orbit point w.v0 nearest to y (ties by word order) and its distance."""
        d0 = distance(y, self.base)
        best = (d0, ())
        for dw, w, wy in self._orbit:
            if dw > 2 * d0:
                break
            d = distance(y, wy)
            if d < best[0]:
                best = (d, w)
        return best

    def _ties(self, y):
        d0 = distance(y, self.base)
        return [w for dw, w, wy in self._orbit if w and dw <= 2 * d0 and distance(y, wy) == d0]

    def _directions(self, x):
        dirs = {}
        for z in self.limit_points:
            n = step_toward(x, z)
            dirs.setdefault(n.key(), (n, z))
        return dirs

    # fundamental set ---------------------------------------------------------

    def _build_fundamental_set(self):
        G, v0 = self.group, self.base
        inside = {v0.key(): v0}
        queue = [v0]
        self._dirs = {}
        while queue:
            x = queue.pop()
            dirs = self._directions(x)
            self._dirs[x.key()] = dirs
            for n, _ in dirs.values():
                if n.key() in inside:
                    continue
                if self._nearest(n)[1] == ():
                    inside[n.key()] = n
                    queue.append(n)
        # representatives of tie classes
        for k, y in inside.items():
            best = (y.key(), y, ())
            for w in self._ties(y):
                u = invert(w)
                z = G.act(u, y)
                if z.key() not in inside:
                    raise NotStabilized("fundamental set is not closed under boundary pairings")
                if z.key() < best[0]:
                    best = (z.key(), z, u)
            self._rep[k] = (best[1], best[2])
        self.representatives = sorted({c.key(): c for c, _ in self._rep.values()}.values(), key=lambda c: c.key())
        self._inside = inside

    def _canon_near(self, n):
        """(c, u) with u.n = c for a tree point adjacent to the fundamental set."""
        hit = self._rep.get(n.key())
        if hit is not None:
            return hit
        d, w = self._nearest(n)
        u = invert(w)
        m = self.group.act(u, n)
        hit = self._rep.get(m.key())
        if hit is None:
            raise NotStabilized("a neighbour of the fundamental set has no representative")
        c, u2 = hit
        return c, compose(u2, u)

    def _build_graph(self):
        G = self.group
        reps = self.representatives
        self._sample = {}
        for c in reps:
            table = {}
            dirs = self._dirs.get(c.key()) or self._directions(c)
            for nk, (n, z) in sorted(dirs.items()):
                c2, u = self._canon_near(n)
                back = G.act(u, c)
                table[nk] = {"n": n, "c2": c2, "u": u, "back": back.key(), "sample": z}
            self._steps[c.key()] = table
        # unit edges: the two steps representing one quotient edge
        for ck, table in self._steps.items():
            for nk, st in table.items():
                other = (st["c2"].key(), st["back"])
                mine = (ck, nk)
                st["unit"] = min(mine, other)
                st["sign"] = 1 if mine <= other else -1
        degree = {c.key(): len(self._steps[c.key()]) for c in reps}
        v0c = self._rep[self.base.key()][0]
        verts = [v0c] + [c for c in reps if c.key() != v0c.key() and degree[c.key()] != 2]
        vid = {c.key(): i for i, c in enumerate(verts)}
        visited = set()
        edges = []
        self._unit_edge = {}
        for c in verts:
            for nk in sorted(self._steps[c.key()]):
                if (c.key(), nk) in visited:
                    continue
                cur, step_key = c.key(), nk
                units = []
                while True:
                    st = self._steps[cur][step_key]
                    visited.add((cur, step_key))
                    visited.add((st["c2"].key(), st["back"]))
                    units.append((st["unit"], st["sign"]))
                    nxt = st["c2"].key()
                    if nxt in vid:
                        break
                    outs = [k for k in self._steps[nxt] if k != st["back"]]
                    if len(outs) != 1:
                        raise NotStabilized("inconsistent valence in the quotient")
                    cur, step_key = nxt, outs[0]
                k = len(edges)
                edges.append((vid[c.key()], vid[nxt], len(units)))
                for unit, s in units:
                    self._unit_edge[unit] = (k, s)
        self.vertex_points = verts
        self.graph = MetricGraph([v.label() for v in verts], edges)
        if self.graph.betti_number() != G.genus:
            raise NotStabilized(f"quotient has first Betti number {self.graph.betti_number()}, expected {G.genus}")
        self._orient(edges)

    def _orient(self, edges):
        """Point each edge along the first generator cycle that crosses it."""
        fixed = set()
        for i in range(1, self.group.genus + 1):
            vals = self.cycle_of(GroupWord([i])).values[::2]
            flip = {k for k, n in enumerate(vals) if n < 0 and k not in fixed}
            fixed.update(k for k, n in enumerate(vals) if n)
            if not flip:
                continue
            for k in flip:
                u, v, ell = edges[k]
                edges[k] = (v, u, ell)
            for unit, (k, s) in self._unit_edge.items():
                if k in flip:
                    self._unit_edge[unit] = (k, -s)
            self.graph = MetricGraph(self.graph.vertices, edges)

    # projections -------------------------------------------------------------

    def canonical(self, x):
        """(c, u) with u.x = c a representative; x must lie on the tree of the limit set."""
        k = x.key()
        hit = self._canon.get(k)
        if hit is not None:
            return hit
        hit = self._rep.get(k)
        if hit is None:
            v0 = self.base
            d = distance(v0, x)
            prev = self._rep[v0.key()]
            for t in range(1, d + 1):
                y = walk(v0, x, t)
                prev = self._canon.get(y.key()) or self._advance(prev, y)
                self._canon[y.key()] = prev
            hit = prev
        self._canon[k] = hit
        return hit

    def _advance(self, prev, y):
        """Canonical data of y from that of a neighbour of y."""
        c, u = prev
        n = self.group.act(u, y)
        st = self._steps[c.key()].get(n.key())
        if st is None:
            raise KeyError("step leaves the tree of the limit set")
        return st["c2"], compose(st["u"], u)

    def project_step(self, x, y):
        """Directed quotient edge carrying the unit step x -> y."""
        c, u = self.canonical(x)
        n = self.group.act(u, y)
        st = self._steps[c.key()].get(n.key())
        if st is None:
            raise KeyError("step leaves the tree of the limit set")
        k, s = self._unit_edge[st["unit"]]
        return 2 * k if s * st["sign"] > 0 else 2 * k + 1

    def cycle_of(self, word):
        """Cycle of the projected path from v0 to w.v0, as a cochain."""
        w = GroupWord.parse(word)
        if w.is_identity():
            raise IdentityWord("identity word")
        v0 = self.base
        target = self.group.act(w, v0)
        counts = [0] * self.graph.num_edges
        prev = v0
        for t in range(1, distance(v0, target) + 1):
            y = walk(v0, target, t)
            e = self.project_step(prev, y)
            counts[e] += 1
            counts[e ^ 1] -= 1
            prev = y
        vals = []
        for e, n in enumerate(counts):
            ell = self.graph.length(e)
            if n % ell:
                raise NotStabilized("projected path does not close up into a cycle")
            vals.append(n // ell)
        return Cochain(self.graph, vals)

    # window of the tree of the limit set ------------------------------------------

    def window(self, depth):
        """Limit-set samples: one end in each direction at distance depth from v0.

        Returns (samples, info) where info maps each sample index to the
        tree points of its last unit step.
        """
        G, v0 = self.group, self.base
        front = [(v0, None, self._rep[v0.key()])]
        for level in range(depth):
            nxt = []
            for x, parent, (c, u) in front:
                uinv = invert(u)
                for nk, st in sorted(self._steps[c.key()].items()):
                    y = G.act(uinv, st["n"])
                    if parent is not None and y == parent:
                        continue
                    cy = (st["c2"], compose(st["u"], u))
                    self._canon.setdefault(y.key(), cy)
                    nxt.append((y, x, cy))
            front = nxt
        samples = []
        for x, parent, (c, u) in front:
            uinv = invert(u)
            for nk, st in sorted(self._steps[c.key()].items()):
                y = G.act(uinv, st["n"])
                if parent is not None and y == parent:
                    continue
                samples.append(G.act(uinv, st["sample"]))
                break
        return samples

    def to_json(self):
        data = self.graph.to_json()
        data["vertex_labels"] = list(self.graph.vertices)
        data["base"] = self.base.label()
        return data

    def to_dot(self):
        return self.graph.to_dot("quotient", [str(v) for v in self.graph.vertices])


def quotient_graph(G, N, check=True):
    """Quotient graph at depth N, verified against depth N+1."""
    Q = QuotientGraph(G, N)
    if check:
        Q2 = QuotientGraph(G, N + 1)
        if not Q.graph.is_isomorphic(Q2.graph):
            raise NotStabilized(f"quotient at depth {N} differs from depth {N + 1}")
    return Q


def cycle_of(G, Q, w):
    return Q.cycle_of(w)


def pairing_gamma(G, Q, w1, w2):
    return cycle_pairing(Q.graph, Q.cycle_of(w1), Q.cycle_of(w2))


def escape_depth(G, z, max_depth=64):
    """Nesting depth of z in the ping-pong disks, or None if it never escapes.

    z lies in the domain of discontinuity exactly when it leaves the nested
    disks s1 s2 ... sk D_t at some finite depth; points of the limit set stay
    inside forever, and so do points whose digits run out on the way.
    """
    disks = G.certificate.disks
    prev = None
    for k in range(max_depth + 1):
        hit = None
        for s in sorted(disks, key=_letter_key):
            if prev is not None and s == -prev:
                continue
            if disks[s].contains(z):
                hit = s
                break
        if hit is None:
            return k
        try:
            z = G.act((-hit,), z)
        except (DegenerateConfiguration, PrecisionExhausted):
            # z is a limit point to all the digits it carries
            return None
        prev = hit
    return None


def small_rationals(limit=200):
    """0, 1, -1, 2, -2, 1/2, -1/2, 3, ... ordered by height."""
    from fractions import Fraction
    from math import gcd

    out = [Fraction(0)]
    h = 1
    while len(out) < limit:
        for b in range(1, h + 1):
            for a in (h, b) if b < h else (h,):
                if gcd(a, b) == 1 and max(a, b) == h:
                    for x in (Fraction(a, b), Fraction(-a, b)):
                        if x not in out:
                            out.append(x)
        h += 1
    return out[:limit]


def points_in_domain(G, count, max_depth=1, exclude=()):
    """Deterministic small rational points of the domain of discontinuity."""
    out = []
    for x in small_rationals(400):
        z = ProjPoint.of(x, G.prime, G.work_precision)
        if any(z == e for e in exclude):
            continue
        d = escape_depth(G, z, max(8, max_depth))
        if d is not None and d <= max_depth:
            out.append(z)
            if len(out) == count:
                break
    return out
