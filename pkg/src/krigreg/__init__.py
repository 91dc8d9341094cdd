"""Kriging with singular and ill-conditioned covariance matrices.

Pseudoinverse and nugget regularization, redundant-point detection,
model-data discrepancy, nugget and length-scale estimation, condition-number
tuning rules and a distribution-wise Gaussian process for repeated points.
"""
__version__ = "0.1.0"

from .distwise import (
    DistWiseModel,
    SiteSummary,
    fit_distwise,
    group_repeated_points,
    predict_mean_dist,
    predict_var_dist,
    sites_from_csv,
    sites_to_csv,
)
from .exceptions import ConditioningError, KrigregError, NumericalError, UsageError
from .gpcore import (
    PI,
    Exact,
    KrigingModel,
    Nugget,
    fit,
    nugget_solve_prediction,
    predict_cov,
    predict_mean,
    predict_mean_at_design,
    predict_var,
)
from .kernels import KernelSpec, covariance_matrix, covariance_vector, cross_covariance, kernel_eval
from .likelihood import (
    HyperParams,
    TuningResult,
    concentrated_neg2ll,
    cv_objective,
    estimate_lengthscales,
    estimate_nugget_cv,
    estimate_nugget_ml,
    log_likelihood,
    loo_residuals,
    pi_tolerance_for_condition,
    smallest_nugget_for_condition,
)
from .redundancy import RedundancyGroup, RedundancyReport, diagnose, discrepancy, redundant_pairs
from .spectral import (
    SpectralDecomposition,
    condition_number,
    eigendecompose,
    image_projector,
    null_projector,
    pi_condition_bound,
    pseudoinverse,
)

__all__ = [name for name in dir() if not name.startswith("_")]
