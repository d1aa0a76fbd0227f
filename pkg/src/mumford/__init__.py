"""p-adic Schottky groups: trees, harmonic measures, theta periods and Abel-Jacobi maps."""
from .bt_tree import FiniteTree, TreePoint, apartment_pairing, build_tree, distance, join, median, retract
from .graph_homology import (
    Cochain,
    MetricGraph,
    cycle_pairing,
    h1_basis,
    measure_of,
    mu_gamma,
    validate_harmonic,
)
from .jacobian import (
    PeriodMatrix,
    TorusPoint,
    abel_jacobi,
    aj_divisor,
    equal_mod_lattice,
    period_matrix,
    reduce_mod_lattice,
)
from .mint import (
    DegreeZeroDivisor,
    evaluate_fD,
    mu_tilde_rational,
    poisson_check,
    riemann_integral,
    valuation_of_integral,
)
from .padic_field import PadicNumber, hensel_sqrt, padic
from .proj_line import Moebius, ProjPoint, cross_ratio, dual_star, parse_point
from .schottky import (
    GroupWord,
    SchottkyGroup,
    analyze_element,
    enumerate_words,
    limit_set_approx,
    pairing_gamma,
    quotient_graph,
    verify_ping_pong,
)
from .theta import ThetaSpec, automorphy_factor, period, theta_quotient

__all__ = [
    "FiniteTree",
    "TreePoint",
    "apartment_pairing",
    "build_tree",
    "distance",
    "join",
    "median",
    "retract",
    "Cochain",
    "MetricGraph",
    "cycle_pairing",
    "h1_basis",
    "measure_of",
    "mu_gamma",
    "validate_harmonic",
    "PeriodMatrix",
    "TorusPoint",
    "abel_jacobi",
    "aj_divisor",
    "equal_mod_lattice",
    "period_matrix",
    "reduce_mod_lattice",
    "DegreeZeroDivisor",
    "evaluate_fD",
    "mu_tilde_rational",
    "poisson_check",
    "riemann_integral",
    "valuation_of_integral",
    "PadicNumber",
    "hensel_sqrt",
    "padic",
    "Moebius",
    "ProjPoint",
    "cross_ratio",
    "dual_star",
    "parse_point",
    "GroupWord",
    "SchottkyGroup",
    "analyze_element",
    "enumerate_words",
    "limit_set_approx",
    "pairing_gamma",
    "quotient_graph",
    "verify_ping_pong",
    "ThetaSpec",
    "automorphy_factor",
    "period",
    "theta_quotient",
]

__version__ = "0.1.0"
