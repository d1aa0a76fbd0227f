"""Theta quotients as truncated products over group words.

theta(p - q; z) / theta(p - q; w) is the limit over N of

    prod_{|g| <= N} (z - g p)(w - g q) / ((z - g q)(w - g p)),

taken shell by shell in word length.  Only such quotients are ever formed.
Orbit points are kept as raw homogeneous vectors: each bracket appears once
in the numerator and once in the denominator, so the scaling cancels.
"""
from dataclasses import dataclass

from .bt_tree import distance, step_toward
from .errors import NotConverged, PoleHit, PrecisionExhausted, SampleDegenerate
from .padic_field import PadicNumber
from .proj_line import ProjPoint
from .schottky import GroupWord, _letter_key, base_vertex, points_in_domain

DEFAULT_CAP = 16
MAX_SHELL_WORDS = 250_000


def default_cap(G):
    """Truncation cap: 16 shells, or enough to exhaust the working precision when g=1."""
    if G.genus == 1:
        ell = min(f.translation_length for f in G.fixed)
        return max(DEFAULT_CAP, -(-G.work_precision // ell) + 2)
    return DEFAULT_CAP


def _shell_size(g, n):
    return 1 if n == 0 else 2 * g * (2 * g - 1) ** (n - 1)


def _int_pair(a, b, K):
    """Scale (a, b) to coprime-to-p integers mod p^K; returns (A, B, K)."""
    p = a.prime
    t = min(a.valuation, b.valuation)
    out = []
    for x in (a, b):
        if x.is_zero():
            K = min(K, x.absolute_precision - t)
            out.append(0)
        else:
            K = min(K, x.valuation - t + x.precision)
            out.append(x.unit * p ** (x.valuation - t))
    m = p**K
    return out[0] % m, out[1] % m, K


def _int_matrix(g, K):
    a, b, c, d = g.entries()
    p = g.prime
    t = min(x.valuation for x in (a, b, c, d))
    out = []
    for x in (a, b, c, d):
        if x.is_zero():
            K = min(K, x.absolute_precision - t)
            out.append(0)
        else:
            K = min(K, x.valuation - t + x.precision)
            out.append(x.unit * p ** (x.valuation - t))
    return out, K


def _orbit_shell(G, x, n):
    """Shell n of the orbit of x: list of (first letter, X, Y, K) with X, Y mod p^K."""
    cache = G.__dict__.setdefault("_theta_orbits", {})
    p = G.prime
    shells = cache.get(x.key())
    if shells is None:
        X, Y, K = _int_pair(x.x0, x.x1, G.work_precision)
        shells = cache[x.key()] = [[(0, X, Y, K)]]
    letters = sorted(G.letters, key=_letter_key)
    mats = {s: _int_matrix(G.matrix((s,)), G.work_precision) for s in letters}
    while len(shells) <= n:
        nxt = []
        for first, X, Y, K in shells[-1]:
            for s in letters:
                if first == -s:
                    continue
                (a, b, c, d), Km = mats[s]
                k = min(K, Km)
                X2, Y2 = a * X + b * Y, c * X + d * Y
                while X2 % p == 0 and Y2 % p == 0 and k > 0:
                    X2 //= p
                    Y2 //= p
                    k -= 1
                if k <= 0:
                    raise PrecisionExhausted("orbit point lost all precision")
                m = p**k
                nxt.append((s, X2 % m, Y2 % m, k))
        shells.append(nxt)
    return shells[n]


@dataclass
class ThetaValue:
    value: PadicNumber
    digits: int
    truncation: int


class ThetaSpec:
    """The product of theta(p_i - q_i; .) over a list of point pairs."""

    def __init__(self, group, divisor, truncation=None, digits=None, min_shells=0):
        self.group = group
        prime = group.prime
        pairs = []
        for p, q in divisor:
            p = ProjPoint.of(p, prime, group.work_precision)
            q = ProjPoint.of(q, prime, group.work_precision)
            if not p == q:
                pairs.append((p, q))
        self.pairs = pairs
        self.truncation = truncation if truncation is not None else default_cap(group)
        self.digits = digits if digits is not None else group.precision
        # shells that must be multiplied in before agreement counts as convergence
        self.min_shells = min_shells


def theta_quotient_detail(S, z, w):
    """theta(z)/theta(w) with its certified digit count and truncation."""
    G = S.group
    p = G.prime
    W = G.work_precision
    if z == w or not S.pairs:
        return ThetaValue(PadicNumber.one(p, W), W, 0)
    z0, z1, Kz = _int_pair(z.x0, z.x1, W)
    w0, w1, Kw = _int_pair(w.x0, w.x1, W)
    mod = p**W
    # running products: numerator and denominator units and valuations
    un, ud, vn, vd, prec = 1, 1, 0, 0, W
    prev = None

    def bracket(a0, a1, Ka, X, Y, K):
        k = min(Ka, K)
        b = (a0 * Y - X * a1) % p**k
        if b == 0:
            raise PoleHit(f"an orbit point meets the evaluation point at word length {n}")
        v = 0
        while b % p == 0:
            b //= p
            v += 1
        return b, v, k - v

    for n in range(S.truncation + 1):
        if _shell_size(G.genus, n) > MAX_SHELL_WORDS:
            break
        for pp, qq in S.pairs:
            for (_, X, Y, K), (_, U, V, L) in zip(_orbit_shell(G, pp, n), _orbit_shell(G, qq, n)):
                # numerator (z - gp)(w - gq), denominator (z - gq)(w - gp)
                a, va, ka = bracket(z0, z1, Kz, X, Y, K)
                d, vd_, kd = bracket(w0, w1, Kw, U, V, L)
                b, vb, kb = bracket(z0, z1, Kz, U, V, L)
                c, vc, kc = bracket(w0, w1, Kw, X, Y, K)
                un = un * a * d % mod
                ud = ud * b * c % mod
                vn += va + vd_
                vd += vb + vc
                prec = min(prec, ka, kd, kb, kc)
        m = p**prec
        cur = PadicNumber(p, vn - vd, un * pow(ud, -1, m), prec)
        if prev is not None and n >= S.min_shells:
            agree = min(prev.agreement(cur), cur.precision)
            if agree >= S.digits:
                return ThetaValue(cur.with_precision(agree), agree, n)
        prev = cur
    got = 0 if prev is None else prev.precision
    raise NotConverged(f"no {S.digits} stable digits within {S.truncation} shells (precision {got})")


def theta_quotient(S, z, w):
    """theta(z)/theta(w), returned at its certified relative precision."""
    return theta_quotient_detail(S, z, w).value


def automorphy_factor_detail(S, word, samples=2):
    """c(w) = theta(z)/theta(w z), checked to agree at two sample points."""
    G = S.group
    w = GroupWord.parse(word)
    m = G.matrix(w)
    support = [x for pair in S.pairs for x in pair]
    vals = []
    for z in points_in_domain(G, 12, exclude=support):
        try:
            vals.append(theta_quotient_detail(S, z, m.act(z)))
        except PoleHit:
            continue
        if len(vals) == samples:
            break
    if len(vals) < samples:
        raise SampleDegenerate("not enough sample points off the poles")
    digits = min(v.digits for v in vals)
    for v in vals[1:]:
        digits = min(digits, vals[0].value.agreement(v.value))
    return ThetaValue(vals[0].value.with_precision(max(digits, 1)), digits, max(v.truncation for v in vals))


def automorphy_factor(S, word):
    return automorphy_factor_detail(S, word).value


def base_point(G, avoid=()):
    """Deterministic small rational point of the domain of discontinuity."""
    pts = points_in_domain(G, 1, exclude=avoid)
    if not pts:
        raise SampleDegenerate("no small rational point in the domain of discontinuity")
    return pts[0]


def period_spec(G, j, truncation=None, digits=None, p=None):
    """ThetaSpec of theta(p - g_j p) for the base point p."""
    p = p or base_point(G)
    q = G.act((j,), p)
    return ThetaSpec(G, [(p, q)], truncation, digits)


def period_detail(G, i, j, truncation=None, digits=None):
    return automorphy_factor_detail(period_spec(G, j, truncation, digits), GroupWord([i]))


def period(G, i, j, truncation=None, digits=None):
    """Q_ij: automorphy factor of theta(p - g_j p) at g_i (generators 1-based)."""
    return period_detail(G, i, j, truncation, digits).value


# -- slopes of |theta| along the tree ---------------------------------------------


def _free_directions(x, ends):
    """One K-point in each direction at x that holds none of the given ends."""
    p = x.prime
    prec = max(x.radius_exp, 0) + 16
    c = x.center
    # offsets keep the samples off the centers, which are often limit points
    tail = PadicNumber(p, x.radius_exp + 1, 1, prec)
    pts = [ProjPoint.of(c + PadicNumber(p, x.radius_exp - 1, 1, prec), p, prec)]
    for t in range(p):
        z = c + tail + (PadicNumber(p, x.radius_exp, t, prec) if t else 0)
        pts.append(ProjPoint.of(z, p, prec))
    blocked = {step_toward(x, a).key() for a in ends}
    return [z for z in pts if step_toward(x, z).key() not in blocked]


def edge_slope(G, word, x, y, ends, bases=3, digits=2):
    """Change of v(theta(p - w p)) across the unit step x -> y.

    x and y lie on the tree spanned by ends.  The value is read off at
    points in directions free of the ends; a direction may still hold a
    zero or pole of the theta function, so several base points p and
    direction pairs vote and the winner must be seen twice and be unique.
    Points far from the base vertex only feel the orbit points of long
    words, so the product is never cut off before those shells.
    """
    w = GroupWord.parse(word)
    v0 = base_vertex(G)
    ell = min(f.translation_length for f in G.fixed)
    reach = max(distance(v0, x), distance(v0, y)) // ell + 2
    zx, zy = _free_directions(x, ends), _free_directions(y, ends)
    if not zx or not zy:
        raise SampleDegenerate(f"no free direction at {x.label()} or {y.label()}")
    votes = {}
    for p in points_in_domain(G, bases):
        S = ThetaSpec(G, [(p, G.act(w, p))], digits=digits, min_shells=reach)
        for a in zx[:2]:
            for b in zy[:2]:
                try:
                    v = theta_quotient_detail(S, b, a).value.valuation
                except PoleHit:
                    continue
                votes[v] = votes.get(v, 0) + 1
    ranked = sorted(votes.items(), key=lambda kv: (-kv[1], kv[0]))
    if not ranked or ranked[0][1] < 2 or (len(ranked) > 1 and ranked[1][1] == ranked[0][1]):
        raise SampleDegenerate(f"ambiguous slope at {x.label()}: {votes}")
    return ranked[0][0]
