"""Exact transition probabilities for the time-inhomogeneous immigration-death process."""
from .errors import DegenerateSpectral, DomainError, IntegrationFailure, PrecisionLoss, ResourceError
from .rates import Constant, ExpDecay, PiecewiseConstant, RateProfile, Sinusoid
from .transition import (
    TransitionQuery,
    TruncationPolicy,
    expr1_finite_sum,
    expr2_charlier,
    km_homogeneous,
    transition_probability,
    transition_row,
)
from .weinorman import GFunctions, SolverConfig, solve_closed, solve_ode

__version__ = "0.1.0"
