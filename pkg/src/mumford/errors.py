"""Exception types raised across the package.

Every error carries a ``kind`` (its class name) so the command line front end
can report it as ``{"error": {"kind": ..., "detail": ...}}``.
"""


class MumfordError(Exception):
    """Base class for all library errors."""

    @property
    def kind(self):
        return type(self).__name__


class MathematicalRejection(MumfordError):
    """The input is well formed but mathematically unusable (CLI exit 2)."""


# p-adic arithmetic
class DivisionByZeroToPrecision(MumfordError, ZeroDivisionError):
    pass


class PrimeMismatch(MumfordError, ValueError):
    pass


class NotASquare(MumfordError, ValueError):
    pass


class EvenPrimeUnsupported(MumfordError, ValueError):
    pass


# projective line and tree
class DegenerateConfiguration(MumfordError, ValueError):
    pass


class EqualPoints(MumfordError, ValueError):
    pass


class NotDistinct(MumfordError, ValueError):
    pass


class SharedEndpoint(MumfordError, ValueError):
    pass


# Schottky groups
class NotHyperbolic(MathematicalRejection):
    pass


class NoPingPongCertificate(MathematicalRejection):
    pass


class NotStabilized(MathematicalRejection):
    pass


class FreeActionViolated(MathematicalRejection):
    pass


class IdentityWord(MumfordError, ValueError):
    pass


# homology and measures
class EdgeOutsideWindow(MumfordError, KeyError):
    pass


class NotABallUnion(MumfordError, ValueError):
    pass


# integration
class SupportMeetsEvaluationPoint(MumfordError, ValueError):
    pass


class DepthInsufficient(MumfordError):
    pass


class PrecisionExhausted(MumfordError):
    pass


# theta functions
class NotConverged(MumfordError):
    pass


class PoleHit(MumfordError):
    pass


class SampleDegenerate(MumfordError):
    pass


# Jacobian
class SymmetryViolation(MumfordError):
    pass


class GramMismatch(MumfordError):
    pass


class NotDegreeZero(MumfordError, ValueError):
    pass


# configuration
class SchemaError(MumfordError, ValueError):
    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class EvenPrime(SchemaError):
    pass


class SingularGenerator(SchemaError):
    pass
