"""Points of P^1(Q_p), Moebius transformations and the cross ratio."""
from fractions import Fraction
import math
import re

from .errors import DegenerateConfiguration, PrimeMismatch
from .padic_field import DEFAULT_PRECISION, PadicNumber, padic


class ProjPoint:
    """A point [x0 : x1] of the projective line in canonical form.

    The coordinate of smaller valuation is scaled to exactly 1; on a tie the
    second coordinate is normalised, so finite points near the origin are
    stored as [z : 1] and points near infinity as [1 : w] with v(w) > 0.
    """

    __slots__ = ("x0", "x1", "prime")

    def __init__(self, x0, x1):
        if x0.prime != x1.prime:
            raise PrimeMismatch("coordinates over different primes")
        self.prime = x0.prime
        if x0.is_zero() and x1.is_zero():
            raise DegenerateConfiguration("[0:0] is not a point")
        if x1.valuation <= x0.valuation:
            one = PadicNumber.one(self.prime, max(x1.precision, 1))
            self.x0, self.x1 = x0 / x1, one
        else:
            one = PadicNumber.one(self.prime, max(x0.precision, 1))
            self.x0, self.x1 = one, x1 / x0

    @classmethod
    def infinity(cls, prime):
        return cls(PadicNumber.one(prime), PadicNumber.zero(prime))

    @classmethod
    def of(cls, value, prime, precision=DEFAULT_PRECISION):
        """Build a point from a rational, a PadicNumber, a ProjPoint or "inf"."""
        if isinstance(value, ProjPoint):
            return value
        if value is None or (isinstance(value, str) and value.strip().lower() in ("inf", "oo", "infinity")):
            return cls.infinity(prime)
        if isinstance(value, float) and math.isinf(value):
            return cls.infinity(prime)
        return cls(padic(value, prime, precision), PadicNumber.one(prime, precision))

    def is_infinity(self):
        return self.x1.is_zero()

    def finite(self):
        """The affine coordinate z = x0/x1 of a finite point."""
        if self.is_infinity():
            raise DegenerateConfiguration("infinity has no affine coordinate")
        return self.x0 / self.x1

    @property
    def precision(self):
        if self.is_infinity():
            return self.x0.precision
        z = self.finite()
        return z.precision if not z.is_zero() else self.x1.precision

    def key(self, digits=None):
        """Hashable canonical key; also used as the deterministic order."""
        if self.is_infinity():
            return (1,)
        z = self.finite()
        if z.is_zero():
            return (0, -math.inf, 0)
        k = z.key(digits)
        return (0, k[0], k[1])

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        if self.is_infinity() or other.is_infinity():
            return self.is_infinity() and other.is_infinity()
        # compare via the determinant, robust to the chart used
        return (self.x0 * other.x1 - self.x1 * other.x0).is_zero()

    __hash__ = None

    def to_text(self):
        if self.is_infinity():
            return "inf"
        z = self.finite()
        r = rational_reconstruction(z)
        if r is not None:
            return str(r)
        return str(z)

    def to_json(self):
        if self.is_infinity():
            return "inf"
        return self.finite().to_json()

    def __repr__(self):
        return f"ProjPoint({self.to_text()})"


def rational_reconstruction(z):
    """Smallest-height rational congruent to z to its precision, if any."""
    if z.is_zero():
        return Fraction(0)
    p, v = z.prime, z.valuation
    m = p**z.precision
    bound = math.isqrt(m // 2)
    r0, r1 = m, z.unit
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or math.gcd(r1, s1) != 1 or s1 % p == 0:
        return None
    return Fraction(r1, s1) * Fraction(p) ** v


def parse_point(text, prime, precision=DEFAULT_PRECISION):
    """Parse "a/b", "inf" or "[x0:x1]" with rational entries."""
    s = str(text).strip()
    m = re.fullmatch(r"\[\s*([^:\]]+)\s*:\s*([^:\]]+)\s*\]", s)
    if m:
        x0 = padic(Fraction(m.group(1).strip()), prime, precision)
        x1 = padic(Fraction(m.group(2).strip()), prime, precision)
        return ProjPoint(x0, x1)
    if s.lower() in ("inf", "oo", "infinity", "∞"):
        return ProjPoint.infinity(prime)
    return ProjPoint.of(Fraction(s), prime, precision)


def _det(a, b):
    """The bracket a0*b1 - b0*a1; equals a - b for finite points."""
    return a.x0 * b.x1 - b.x0 * a.x1


def cross_ratio(a1, z1, a2, z2):
    """(a1-z1)(a2-z2) / ((a1-z2)(a2-z1)), factors at infinity cancelling."""
    den = _det(a1, z2) * _det(a2, z1)
    if den.is_zero():
        raise DegenerateConfiguration("a denominator of the cross ratio vanishes")
    return _det(a1, z1) * _det(a2, z2) / den


def dual_star(x):
    """The involution [a : b] -> [-b : a]."""
    return ProjPoint(-x.x1, x.x0)


class Moebius:
    """A 2x2 invertible matrix acting by [z:1] -> [az+b : cz+d]."""

    __slots__ = ("a", "b", "c", "d", "prime")

    def __init__(self, a, b, c, d):
        self.a, self.b, self.c, self.d = a, b, c, d
        self.prime = a.prime
        if self.det().is_zero():
            raise DegenerateConfiguration("singular matrix")

    @classmethod
    def from_rows(cls, rows, prime, precision=DEFAULT_PRECISION):
        (a, b), (c, d) = rows
        return cls(*(padic(x, prime, precision) for x in (a, b, c, d)))

    @classmethod
    def identity(cls, prime, precision=DEFAULT_PRECISION):
        return cls.from_rows([[1, 0], [0, 1]], prime, precision)

    def det(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, other):
        a, b, c, d = self.entries()
        e, f, g, h = other.entries()
        return Moebius(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def inverse(self):
        # the adjugate; projectively the inverse
        return Moebius(self.d, -self.b, -self.c, self.a)

    def contragredient(self):
        """Inverse transpose, the action on the dual line."""
        return Moebius(self.d, -self.c, -self.b, self.a)

    def normalized(self):
        """Scale so the entry of smallest valuation is a unit."""
        v = min(x.valuation for x in self.entries())
        if v == 0:
            return self
        s = PadicNumber(self.prime, -v, 1, max(x.precision for x in self.entries() if not x.is_zero()))
        return Moebius(*(x * s for x in self.entries()))

    def act(self, x):
        return ProjPoint(self.a * x.x0 + self.b * x.x1, self.c * x.x0 + self.d * x.x1)

    __call__ = act

    def __eq__(self, other):
        if not isinstance(other, Moebius):
            return NotImplemented
        m, n = self.entries(), other.entries()
        return all((m[i] * n[j] - m[j] * n[i]).is_zero() for i in range(4) for j in range(i + 1, 4))

    __hash__ = None

    def __repr__(self):
        return f"Moebius([[{self.a}, {self.b}], [{self.c}, {self.d}]])"


def moebius_act(g, x):
    return g.act(x)
