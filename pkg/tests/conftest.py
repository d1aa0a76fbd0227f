from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from mumford.schottky import SchottkyGroup, quotient_graph

settings.register_profile(
    "repo", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("repo")

TATE5 = [[[5, 0], [0, 1]]]
TATE25 = [[[25, 0], [0, 1]]]
# diag(25,1) and its conjugate by [[1,1],[1,-1]]
G2_ROWS = [[[25, 0], [0, 1]], [[13, -12], [-12, 13]]]


def frac_val(x, p):
    """Valuation of a nonzero rational."""
    x = Fraction(x)
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


@pytest.fixture(scope="session")
def tate5():
    return SchottkyGroup.from_rows(TATE5, 5)


@pytest.fixture(scope="session")
def tate25():
    return SchottkyGroup.from_rows(TATE25, 5)


@pytest.fixture(scope="session")
def g2():
    return SchottkyGroup.from_rows(G2_ROWS, 5)


@pytest.fixture(scope="session")
def g2_quotient(g2):
    return quotient_graph(g2, 3)


@pytest.fixture(scope="session")
def g2_periods(g2, g2_quotient):
    from mumford.jacobian import period_matrix

    return period_matrix(g2, digits=12, quotient=g2_quotient)
