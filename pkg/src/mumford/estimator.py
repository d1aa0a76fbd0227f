"""Estimator-style wrapper: fit a Schottky group, transform points to the torus.

    est = SchottkyJacobian(prime=5, digits=12).fit([[[25, 0], [0, 1]], [[13, -12], [-12, 13]]])
    est.period_matrix_.gram          # [[2, 0], [0, 2]]
    est.transform(["3", "1/3"])      # Abel-Jacobi coordinates, one row per point
    est.predict(["3", "1/3"])        # lattice index n of each point

Values are p-adic numbers, so transform returns an object array of
PadicNumber rather than floats.
"""
from fractions import Fraction
from numbers import Rational

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .errors import SingularGenerator
from .padic_field import PadicNumber, check_prime
from .proj_line import ProjPoint, parse_point


def _rational(x, where):
    if isinstance(x, (bool, np.bool_)):
        raise TypeError(f"{where}: booleans are not matrix entries")
    if isinstance(x, (Rational, np.integer)):
        return Fraction(int(x)) if isinstance(x, np.integer) else Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"{where}: not a rational {x!r}") from None
    raise TypeError(f"{where}: expected an integer, Fraction or string, got {type(x).__name__}")


def check_generators(X):
    """Validate a (g, 2, 2) collection of rational matrices; returns Fraction rows."""
    if isinstance(X, np.ndarray):
        X = X.tolist()
    try:
        mats = list(X)
    except TypeError:
        raise TypeError("generators must be a sequence of 2x2 matrices") from None
    if not mats:
        raise ValueError("need at least one generator")
    out = []
    for i, m in enumerate(mats):
        rows = list(m)
        if len(rows) != 2 or any(len(list(r)) != 2 for r in rows):
            raise ValueError(f"generator {i} is not 2x2")
        rows = [[_rational(x, f"generator {i}") for x in r] for r in rows]
        if rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0] == 0:
            raise SingularGenerator(f"generators[{i}]", "matrix is not invertible")
        out.append(rows)
    return out


def check_points(X, prime, precision):
    """Coerce a 1-d sequence of points (text, rationals or ProjPoint) to ProjPoint."""
    if isinstance(X, (str, ProjPoint)) or np.ndim(X) == 0:
        raise ValueError("expected a 1-d sequence of points")
    pts = []
    for x in X:
        if isinstance(x, ProjPoint):
            if x.prime != prime:
                raise ValueError(f"point over Q_{x.prime}, estimator is over Q_{prime}")
            pts.append(x)
        elif isinstance(x, PadicNumber):
            pts.append(ProjPoint.of(x, prime, precision))
        else:
            pts.append(parse_point(str(x), prime, precision))
    return pts


class SchottkyJacobian(TransformerMixin, BaseEstimator):
    """Jacobian torus of the Mumford curve of a Schottky group.

    fit takes the generator matrices and computes the quotient graph and the
    period matrix; transform sends points of the domain of discontinuity to
    their Abel-Jacobi coordinates relative to ``base``.
    """

    def __init__(self, prime=5, precision=24, depth=3, truncation=None, digits=None, base=None):
        self.prime = prime
        self.precision = precision
        self.depth = depth
        self.truncation = truncation
        self.digits = digits
        self.base = base

    def fit(self, X, y=None):
        from .jacobian import period_matrix
        from .schottky import SchottkyGroup, points_in_domain, quotient_graph

        check_prime(self.prime)
        if self.precision < 8:
            raise ValueError("precision must be at least 8")
        rows = check_generators(X)
        G = SchottkyGroup.from_rows(rows, self.prime, self.precision)
        self.generators_ = rows
        self.group_ = G
        self.quotient_ = quotient_graph(G, self.depth)
        self.period_matrix_ = period_matrix(G, self.truncation, self.digits, quotient=self.quotient_)
        self.gram_ = np.array(self.period_matrix_.gram, dtype=np.int64)
        if self.base is None:
            self.base_point_ = points_in_domain(G, 1)[0]
        else:
            self.base_point_ = check_points([self.base], self.prime, G.work_precision)[0]
        self.n_features_in_ = 1
        return self

    def _torus_points(self, X):
        from .jacobian import abel_jacobi

        check_is_fitted(self, "period_matrix_")
        G = self.group_
        pts = check_points(X, self.prime, G.work_precision)
        return [abel_jacobi(G, z, self.base_point_, self.truncation, self.digits) for z in pts]

    def transform(self, X):
        """Abel-Jacobi coordinates, an object array of shape (n_points, genus)."""
        ts = self._torus_points(X)
        out = np.empty((len(ts), self.group_.genus), dtype=object)
        for i, t in enumerate(ts):
            out[i, :] = t.coords
        return out

    def predict(self, X):
        """Integer lattice index n of each point (Babai rounding in the Gram basis)."""
        from .jacobian import reduce_mod_lattice

        ns = [reduce_mod_lattice(self.period_matrix_, t)[1] for t in self._torus_points(X)]
        return np.array(ns, dtype=np.int64).reshape(len(ns), self.group_.genus)

    def same_class(self, z1, z2):
        """Whether two points have equal Abel-Jacobi images modulo the lattice."""
        from .jacobian import equal_mod_lattice

        t1, t2 = self._torus_points([z1, z2])
        return equal_mod_lattice(self.period_matrix_, t1, t2)
