"""Verification toolkit for moments of quadratic character sums and theta functions.

The package computes, exactly or to controlled precision, the quantities that
drive the asymptotics of the family of primitive real characters chi_d over
positive fundamental discriminants: character sums and their moments, weighted
counts of tuples with square product, the Euler-product and polytope constants
of the predicted main term, truncated theta values, and the auxiliary analytic
bounds.  Exact paths use big integers and rationals; floating paths report
certified or compensated error bounds.
"""

__version__ = "0.1.0"

from .arith import (
    Discriminant,
    DiscriminantKind,
    char_sum_over_discriminants,
    enumerate_fundamental,
    fundamental_discriminants,
    is_fundamental,
    kronecker,
    radical_weight,
)
from .errors import BudgetExceeded, NumericFailure, ValidationError

__all__ = [
    "Discriminant",
    "DiscriminantKind",
    "BudgetExceeded",
    "NumericFailure",
    "ValidationError",
    "char_sum_over_discriminants",
    "enumerate_fundamental",
    "fundamental_discriminants",
    "is_fundamental",
    "kronecker",
    "radical_weight",
    "__version__",
]
