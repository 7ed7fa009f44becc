"""Exact verification of generalized multi-sum Chu-Vandermonde identities."""

from .closed_form import (
    DegenerateDenominator,
    RhsStrategy,
    moment_literal,
    moment_restricted,
    moment_unrestricted,
    rhs_abs_squared,
    rhs_by_moments,
    rhs_literal,
    rhs_unrestricted,
)
from .enumeration import brute_force_lhs, brute_force_moment, enumerate_box, enumerate_compositions
from .exact import GaussianRational, abs_squared, binomial, conj, falling_factorial
from .instance import (
    Aggregates,
    Bounds,
    IdentityLabel,
    MomentLabel,
    ProblemInstance,
    compute_aggregates,
    random_instance,
    validate,
)

__version__ = "0.1.0"
