"""Lower and upper bounds on the minimal admissible family size."""

from .closed_forms import ClosedFormBounds, bound_closed_forms, rm1_exact, rm1_upper, upper_33a, upper_33b
from .ilp import IlpError, IlpSolution, enumerate_ilp, ilp_minimum_by_enumeration, lp_relaxation, solve_ilp

__all__ = [
    "ClosedFormBounds",
    "IlpError",
    "IlpSolution",
    "bound_closed_forms",
    "enumerate_ilp",
    "ilp_minimum_by_enumeration",
    "lp_relaxation",
    "rm1_exact",
    "rm1_upper",
    "solve_ilp",
    "upper_33a",
    "upper_33b",
]
