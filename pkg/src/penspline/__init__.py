"""Bayesian and frequentist penalized-spline regression on [0, 1].

Core layers: B-spline bases with exact Gramian and roughness-penalty matrices
(``basis``), Demmler-Reinsch bases (``drbasis``), penalized and truncated
estimators (``estimators``), smoothing-variance hyperpriors and induced
coefficient priors (``priors``), a Gibbs/Metropolis sampler (``sampler``), a
simulation-study harness with a CLI (``harness``, ``cli``), and estimator-style
wrappers (``regression``).
"""

from .basis import (
    DesignMatrix,
    PenaltyMatrix,
    SplineSpace,
    design_matrix,
    eval_basis,
    gramian,
    interpolate_coefficients,
    make_space,
    penalty_matrix,
)
from .drbasis import DrBasis, dr_basis, dr_basis_for_design, dr_coords, dr_norms
from .errors import PensplineError
from .estimators import (
    FitResult,
    osplines_fit,
    shrinkage_weights,
    sigma2_hat,
    theorem_cutoff,
    truncated_dr_fit,
)
from .priors import (
    HyperPrior,
    ProperPriorSpec,
    RateSchedule,
    check_a5,
    corollary1_schedule,
    hyperprior_logpdf,
    marginal_prior_logdensity,
    proper_precision,
)
from .regression import BayesianOSplineRegressor, OSplineRegressor, TruncatedDRRegressor
from .sampler import (
    ChainOutput,
    ModelSpec,
    ResidualVariance,
    effective_sample_size,
    gibbs_run,
    posterior_summary,
)

__version__ = "1.0.0"

__all__ = [
    "SplineSpace",
    "DesignMatrix",
    "PenaltyMatrix",
    "make_space",
    "eval_basis",
    "design_matrix",
    "gramian",
    "penalty_matrix",
    "interpolate_coefficients",
    "DrBasis",
    "dr_basis",
    "dr_basis_for_design",
    "dr_coords",
    "dr_norms",
    "FitResult",
    "osplines_fit",
    "truncated_dr_fit",
    "theorem_cutoff",
    "shrinkage_weights",
    "sigma2_hat",
    "HyperPrior",
    "ProperPriorSpec",
    "RateSchedule",
    "hyperprior_logpdf",
    "marginal_prior_logdensity",
    "proper_precision",
    "corollary1_schedule",
    "check_a5",
    "ModelSpec",
    "ResidualVariance",
    "ChainOutput",
    "gibbs_run",
    "posterior_summary",
    "effective_sample_size",
    "OSplineRegressor",
    "TruncatedDRRegressor",
    "BayesianOSplineRegressor",
    "PensplineError",
]
