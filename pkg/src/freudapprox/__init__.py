"""Polynomial approximation in L2(exp(-2|x|**alpha) dx) for alpha > 1."""

__version__ = "0.1.0"

from .errors import (
    ConvergenceFailure,
    FreudApproxError,
    InternalError,
    InvalidArgument,
    InvalidFunction,
)
from .quadrature import (
    QuadratureRule,
    eigen_sym_tridiag,
    freud_moment,
    freud_mu0,
    gauss_legendre,
    golub_welsch,
)
from .orthopoly import (
    FreudWeight,
    RecurrenceTable,
    closed_form_recurrence,
    eval_poly_derivs,
    eval_polys,
    eval_polys_scaled,
    gauss_freud,
    gauss_freud_rule,
    recurrence_table,
    stieltjes_recurrence,
)
from .functions import FunctionSpec, corpus
from .expansion import (
    Expansion,
    SeminormTable,
    distance,
    distance_to_degree,
    fourier_coefficients,
    reconstruct,
    seminorms,
    tail_distance,
)
from .diagnostics import (
    classify_rapid,
    growth_bound_check,
    iterated_markov_check,
    jackson_table,
    markov_table,
)
from .alpha2 import (
    coefficient_correspondence,
    dilation_check,
    hermite_functions,
    schwartz_lift,
)
