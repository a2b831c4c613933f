"""Certified high-order proximal-point solvers for convex composite problems.

The package minimizes F = f + psi through inexact pth-order proximal steps
whose inexactness is measured by an acceptance certificate, with three outer
drivers (plain, accelerated, bi-level) and a Bregman composite gradient inner
loop built on a high-order scaling function.
"""

from .acceptance import (
    ACCEPT_SLACK,
    AcceptanceCertificate,
    INEQ_SLACK,
    ProxConfig,
    acceptable_interval_1d,
    certificate_inequalities,
    check_acceptable,
    exact_prox_1d,
    regularized_gradient,
)
from .bregman import (
    RegularizedObjective,
    RelativeConstants,
    ScalingFunction,
    bilevel_h,
    bregman_distance,
    hat_l_literal,
    hat_l_sampled,
    relative_constants,
    relative_sandwich_check,
    rho_value_grad,
    theta_bound,
    theta_constants,
)
from .errors import (
    CapabilityError,
    CertificateError,
    DimensionError,
    DomainError,
    NumericalError,
    ParameterError,
)
from .inner import (
    InnerResult,
    InnerTrace,
    StepSolver,
    ball_inner_step_p3,
    inner_solve,
    inner_step,
)
from .metric import MetricSpace, PowerProx
from .oracles import (
    QuadraticObjective,
    SeparableObjective,
    SmoothOracle,
    fd_check,
    psi_prox_euclid,
    psi_subgradient_select,
)
from .outer import (
    EstimatingState,
    OuterTrace,
    aihopp_run,
    biopt_run,
    bound_evaluator,
    coefficients,
    estimating_update,
    exact_prox_provider,
    ihopp_run,
    inner_prox_provider,
    psi_argmin,
    tensor_prox_provider,
)
from .problems import Problem, get_problem, list_problems
from .scalar_families import make_family
from .simple_terms import make_term
from .tensor_step import (
    TaylorModel,
    convexity_threshold,
    lemma2_bound_check,
    tensor_acceptance_map,
    tensor_criterion,
    tensor_step_1d,
)
from .univariate import minimize_composite_1d
from .verify import CheckResult, run_suite

__version__ = "0.1.0"

__all__ = [
    "ACCEPT_SLACK",
    "AcceptanceCertificate",
    "CapabilityError",
    "CertificateError",
    "CheckResult",
    "DimensionError",
    "DomainError",
    "EstimatingState",
    "INEQ_SLACK",
    "InnerResult",
    "InnerTrace",
    "MetricSpace",
    "NumericalError",
    "OuterTrace",
    "ParameterError",
    "PowerProx",
    "Problem",
    "ProxConfig",
    "QuadraticObjective",
    "RegularizedObjective",
    "RelativeConstants",
    "ScalingFunction",
    "SeparableObjective",
    "SmoothOracle",
    "StepSolver",
    "TaylorModel",
    "acceptable_interval_1d",
    "aihopp_run",
    "ball_inner_step_p3",
    "bilevel_h",
    "biopt_run",
    "bound_evaluator",
    "bregman_distance",
    "certificate_inequalities",
    "check_acceptable",
    "coefficients",
    "convexity_threshold",
    "estimating_update",
    "exact_prox_1d",
    "exact_prox_provider",
    "fd_check",
    "get_problem",
    "hat_l_literal",
    "hat_l_sampled",
    "ihopp_run",
    "inner_prox_provider",
    "inner_solve",
    "inner_step",
    "lemma2_bound_check",
    "list_problems",
    "make_family",
    "make_term",
    "minimize_composite_1d",
    "psi_argmin",
    "psi_prox_euclid",
    "psi_subgradient_select",
    "regularized_gradient",
    "relative_constants",
    "relative_sandwich_check",
    "rho_value_grad",
    "run_suite",
    "tensor_acceptance_map",
    "tensor_criterion",
    "tensor_prox_provider",
    "tensor_step_1d",
    "theta_bound",
    "theta_constants",
]
