"""Period matrix, the lattice it generates in (Q_p^*)^g, and the Abel-Jacobi map."""
from dataclasses import dataclass
from fractions import Fraction
import math

from .errors import GramMismatch, NotDegreeZero, PoleHit, SymmetryViolation
from .graph_homology import gram_matrix, leading_minors
from .padic_field import PadicNumber
from .proj_line import ProjPoint
from .schottky import GroupWord, points_in_domain, quotient_graph
from .theta import period_detail, period_spec, theta_quotient_detail


class TorusPoint:
    """A point of (Q_p^*)^g, multiplied coordinatewise."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        coords = tuple(coords)
        for x in coords:
            if x.is_zero():
                raise ValueError("torus coordinates must be nonzero")
        self.coords = coords

    @classmethod
    def identity(cls, prime, g, precision):
        return cls(PadicNumber.one(prime, precision) for _ in range(g))

    def __mul__(self, other):
        return TorusPoint(a * b for a, b in zip(self.coords, other.coords))

    def __truediv__(self, other):
        return TorusPoint(a / b for a, b in zip(self.coords, other.coords))

    def __pow__(self, k):
        return TorusPoint(a**k for a in self.coords)

    def valuations(self):
        return [a.valuation for a in self.coords]

    @property
    def digits(self):
        return min(a.precision for a in self.coords)

    def is_identity(self, digits=None):
        n = self.digits if digits is None else digits
        return n >= 1 and all(a.valuation == 0 and a.agreement(1) >= n for a in self.coords)

    def to_json(self):
        return [a.to_json() for a in self.coords]

    def __repr__(self):
        return f"TorusPoint({', '.join(str(a) for a in self.coords)})"


@dataclass
class PeriodMatrix:
    Q: list  # Q[i][j], 0-based
    gram: list
    digits: int

    @property
    def genus(self):
        return len(self.Q)

    def column(self, i):
        return TorusPoint(self.Q[r][i] for r in range(self.genus))

    def lattice_element(self, n):
        """prod_i column_i^{n_i}."""
        g = self.genus
        out = TorusPoint.identity(self.Q[0][0].prime, g, self.digits)
        for i, k in enumerate(n):
            if k:
                out = out * self.column(i) ** k
        return out

    def to_json(self):
        return {
            "Q": [[x.to_json() for x in row] for row in self.Q],
            "gram": self.gram,
            "digits": self.digits,
        }


def period_matrix(G, truncation=None, digits=None, quotient=None, depth=3):
    """Q_ij for all generator pairs, with the symmetry and Gram checks enforced."""
    g = G.genus
    Q = [[None] * g for _ in range(g)]
    dig = []
    for i in range(g):
        for j in range(g):
            d = period_detail(G, i + 1, j + 1, truncation, digits)
            Q[i][j] = d.value
            dig.append(d.digits)
    certified = min(dig)
    for i in range(g):
        for j in range(i + 1, g):
            agree = Q[i][j].agreement(Q[j][i])
            if Q[i][j].valuation != Q[j][i].valuation or agree < min(Q[i][j].precision, Q[j][i].precision):
                raise SymmetryViolation(f"Q[{i + 1}][{j + 1}] and Q[{j + 1}][{i + 1}] agree on {agree} digits only")
    gram = [[Q[i][j].valuation for j in range(g)] for i in range(g)]
    if quotient is None:
        quotient = quotient_graph(G, depth)
    cycles = [quotient.cycle_of(GroupWord([i + 1])) for i in range(g)]
    expected = gram_matrix(quotient.graph, cycles)
    if expected != gram:
        raise GramMismatch(f"valuations {gram} differ from the graph pairing {expected}")
    if any(m <= 0 for m in leading_minors(gram)):
        raise GramMismatch(f"Gram matrix {gram} is not positive definite")
    return PeriodMatrix(Q, gram, certified)


def _round_half_to_zero(x):
    f = math.floor(x)
    r = x - f
    if r > Fraction(1, 2):
        return f + 1
    if r < Fraction(1, 2):
        return f
    return f if x > 0 else f + 1


def _solve(M, v):
    """Exact solution of M x = v over the rationals (M invertible)."""
    n = len(M)
    A = [[Fraction(M[i][j]) for j in range(n)] + [Fraction(v[i])] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col] / A[col][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return [A[i][n] / A[i][i] for i in range(n)]


def reduce_mod_lattice(P, t):
    """(representative, n) with n the rounded coordinates of v(t) in the Gram basis."""
    x = _solve(P.gram, t.valuations())
    n = [_round_half_to_zero(a) for a in x]
    rep = t / P.lattice_element(n) if any(n) else t
    return rep, n


def equal_mod_lattice(P, t1, t2):
    """Whether t1/t2 lies in the lattice, to the certified digits."""
    r = t1 / t2
    x = _solve(P.gram, r.valuations())
    if any(a.denominator != 1 for a in x):
        return False
    u = r / P.lattice_element([int(a) for a in x])
    return u.is_identity(min(u.digits, P.digits))


def _as_point(G, z):
    return ProjPoint.of(z, G.prime, G.work_precision)


def abel_jacobi(G, z, z0, truncation=None, digits=None):
    """Coordinates theta(p - g_j p; z) / theta(p - g_j p; z0), j = 1..g.

    The quotient does not depend on the base point p; when z or z0 lies on
    the orbit of the default p the next candidate is used.
    """
    z, z0 = _as_point(G, z), _as_point(G, z0)
    coords = []
    for j in range(1, G.genus + 1):
        for p in points_in_domain(G, 4):
            try:
                S = period_spec(G, j, truncation, digits, p)
                coords.append(theta_quotient_detail(S, z, z0).value)
                break
            except PoleHit:
                continue
        else:
            raise PoleHit(f"{z.to_text()} or {z0.to_text()} meets every candidate theta divisor")
    return TorusPoint(coords)


def aj_divisor(G, D, z0, truncation=None, digits=None):
    """Product of abel_jacobi(z, z0)^m over a degree zero divisor [(z, m), ...]."""
    if sum(m for _, m in D) != 0:
        raise NotDegreeZero(f"degree {sum(m for _, m in D)}")
    out = TorusPoint.identity(G.prime, G.genus, G.work_precision)
    for z, m in D:
        if m:
            out = out * abel_jacobi(G, z, z0, truncation, digits) ** m
    return out
