"""Elements of Q_p with tracked relative precision.

A nonzero value is ``p**valuation * unit`` where ``unit`` is an integer in
``[0, p**precision)`` prime to p.  Zero is stored with valuation INFINITE and
remembers the absolute precision to which it is known to vanish.
"""
from fractions import Fraction
from functools import lru_cache
import math

from .errors import (
    DivisionByZeroToPrecision,
    EvenPrimeUnsupported,
    NotASquare,
    PrimeMismatch,
)

INFINITE = math.inf
DEFAULT_PRECISION = 24
GUARD_DIGITS = 8


@lru_cache(maxsize=None)
def _power(p, k):
    return p**k


@lru_cache(maxsize=64)
def check_prime(p):
    """Validate the prime; p=2 is rejected everywhere in the package."""
    if not isinstance(p, int) or p < 2:
        raise ValueError(f"not a prime: {p!r}")
    if p == 2:
        raise EvenPrimeUnsupported("p=2 is not supported")
    if p % 2 == 0:
        raise ValueError(f"not a prime: {p}")
    d = 3
    while d * d <= p:
        if p % d == 0:
            raise ValueError(f"not a prime: {p}")
        d += 2
    return p


def _split(n, p):
    """Return (k, m) with n = p**k * m and m prime to p; n != 0."""
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k, n


class PadicNumber:
    __slots__ = ("prime", "valuation", "unit", "precision", "_abs")

    def __init__(self, prime, valuation, unit, precision, absolute=None):
        self.prime = prime
        if valuation == INFINITE:
            self.valuation = INFINITE
            self.unit = 0
            self.precision = 0
            self._abs = INFINITE if absolute is None else absolute
            return
        if precision <= 0:
            raise ValueError("relative precision must be positive")
        mod = _power(prime, precision)
        unit %= mod
        if unit % prime == 0:
            raise ValueError("unit must be prime to p")
        self.valuation = valuation
        self.unit = unit
        self.precision = precision
        self._abs = valuation + precision

    # -- constructors -------------------------------------------------

    @classmethod
    def from_rational(cls, x, prime, precision=DEFAULT_PRECISION):
        check_prime(prime)
        x = Fraction(x)
        if x == 0:
            return cls.zero(prime)
        vn, num = _split(x.numerator, prime)
        vd, den = _split(x.denominator, prime)
        mod = _power(prime, precision)
        return cls(prime, vn - vd, num * pow(den, -1, mod), precision)

    @classmethod
    def zero(cls, prime, absolute=INFINITE):
        return cls(prime, INFINITE, 0, 0, absolute)

    @classmethod
    def one(cls, prime, precision=DEFAULT_PRECISION):
        return cls(prime, 0, 1, precision)

    # -- basic queries ------------------------------------------------

    @property
    def absolute_precision(self):
        return self._abs

    def is_zero(self):
        return self.valuation == INFINITE

    def __bool__(self):
        return not self.is_zero()

    def to_fraction(self):
        """The rational representative p**v * unit (0 for zero)."""
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.prime) ** self.valuation

    def residue(self):
        """Leading unit digit, i.e. unit mod p (0 for zero)."""
        return self.unit % self.prime

    def with_precision(self, precision):
        """Truncate (never extend) the relative precision."""
        if self.is_zero() or precision >= self.precision:
            return self
        return PadicNumber(self.prime, self.valuation, self.unit, precision)

    def key(self, digits=None):
        """Hashable canonical key, optionally truncated to `digits`."""
        if self.is_zero():
            return ("0",)
        n = self.precision if digits is None else min(digits, self.precision)
        return (self.valuation, self.unit % _power(self.prime, n))

    # -- arithmetic ---------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PadicNumber):
            if other.prime != self.prime:
                raise PrimeMismatch(f"{self.prime} vs {other.prime}")
            return other
        if isinstance(other, (int, Fraction)):
            prec = max(self.precision, DEFAULT_PRECISION)
            return PadicNumber.from_rational(other, self.prime, prec)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.prime
        absprec = min(self._abs, other._abs)
        if self.is_zero() and other.is_zero():
            return PadicNumber.zero(p, absprec)
        if self.is_zero() or other.is_zero():
            x = other if self.is_zero() else self
            if x.valuation >= absprec:
                return PadicNumber.zero(p, absprec)
            return PadicNumber(p, x.valuation, x.unit, min(x.precision, absprec - x.valuation))
        v0 = min(self.valuation, other.valuation)
        if absprec <= v0:
            return PadicNumber.zero(p, absprec)
        s = self.unit * _power(p, self.valuation - v0) + other.unit * _power(p, other.valuation - v0)
        s %= _power(p, absprec - v0)
        if s == 0:
            return PadicNumber.zero(p, absprec)
        k, s = _split(s, p)
        return PadicNumber(p, v0 + k, s, absprec - v0 - k)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        return PadicNumber(self.prime, self.valuation, -self.unit, self.precision)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.prime
        if self.is_zero() or other.is_zero():
            if self.is_zero() and other.is_zero():
                return PadicNumber.zero(p, self._abs + other._abs)
            z, x = (self, other) if self.is_zero() else (other, self)
            return PadicNumber.zero(p, z._abs + x.valuation)
        n = min(self.precision, other.precision)
        return PadicNumber(p, self.valuation + other.valuation, self.unit * other.unit, n)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise DivisionByZeroToPrecision("inverse of zero to precision")
        mod = _power(self.prime, self.precision)
        return PadicNumber(self.prime, -self.valuation, pow(self.unit, -1, mod), self.precision)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise DivisionByZeroToPrecision("division by zero to precision")
        if self.is_zero():
            return PadicNumber.zero(self.prime, self._abs - other.valuation)
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        if self.is_zero():
            if n == 0:
                return PadicNumber.one(self.prime)
            return PadicNumber.zero(self.prime, self._abs * n)
        mod = _power(self.prime, self.precision)
        return PadicNumber(self.prime, self.valuation * n, pow(self.unit, n, mod), self.precision)

    # -- comparison ---------------------------------------------------

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return (self - other).is_zero()

    __hash__ = None

    def agreement(self, other):
        """Number of leading relative digits on which two values agree."""
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return INFINITE if (self - other).is_zero() else 0
        if self.valuation != other.valuation:
            return 0
        d = self - other
        n = min(self.precision, other.precision)
        if d.is_zero():
            return n
        return min(n, d.valuation - self.valuation)

    def __repr__(self):
        if self.is_zero():
            return f"PadicNumber(p={self.prime}, 0 mod p^{self._abs})"
        return f"PadicNumber(p={self.prime}, v={self.valuation}, unit={self.unit}, prec={self.precision})"

    def __str__(self):
        if self.is_zero():
            return "0"
        return f"{self.prime}^{self.valuation}*{self.unit}"

    # -- serialization ------------------------------------------------

    def to_json(self):
        if self.is_zero():
            prec = "inf" if self._abs == INFINITE else self._abs
            return {"v": "inf", "unit": "0", "prec": prec}
        return {"v": self.valuation, "unit": str(self.unit), "prec": self.precision}

    @classmethod
    def from_json(cls, data, prime):
        if data["v"] == "inf":
            prec = data.get("prec", "inf")
            return cls.zero(prime, INFINITE if prec == "inf" else int(prec))
        return cls(prime, int(data["v"]), int(data["unit"]), int(data["prec"]))


def valuation(a):
    """The p-adic valuation, INFINITE for zero to precision."""
    return a.valuation


def padic(x, prime, precision=DEFAULT_PRECISION):
    """Coerce an int, Fraction, numeric string or PadicNumber into Q_p."""
    if isinstance(x, PadicNumber):
        if x.prime != prime:
            raise PrimeMismatch(f"{x.prime} vs {prime}")
        return x
    if isinstance(x, str):
        x = Fraction(x)
    return PadicNumber.from_rational(x, prime, precision)


def _sqrt_mod_p(a, p):
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
    else:
        r = next(x for x in range(1, p) if x * x % p == a)
    return min(r, p - r)


def hensel_sqrt(a):
    """Square root in Q_p for odd p.

    The root whose unit is congruent to the smaller of the two square roots
    mod p is returned.
    """
    p = a.prime
    if p == 2:
        raise EvenPrimeUnsupported("square roots need an odd prime")
    if a.is_zero():
        raise NotASquare("zero to precision has no certified square root")
    if a.valuation % 2:
        raise NotASquare(f"odd valuation {a.valuation}")
    r = _sqrt_mod_p(a.unit % p, p)
    if r is None:
        raise NotASquare(f"{a.unit % p} is not a square mod {p}")
    n = a.precision
    k = 1
    while k < n:
        k = min(2 * k, n)
        mod = _power(p, k)
        r = (r - (r * r - a.unit) * pow(2 * r, -1, mod)) % mod
    return PadicNumber(p, a.valuation // 2, r, n)
