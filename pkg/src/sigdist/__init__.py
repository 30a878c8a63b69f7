"""Prediction regions and significance-level scores for outlier detection.

The pipeline: take (or fit) a density model for the inlier-generating
process, draw Monte Carlo samples, and sort their log-densities. The result
is an empirical CDF of density values that turns a significance level alpha
into a density threshold theta, and any feature vector into a significance
level z = (estimated probability of all points less likely than it).
Classify x as an outlier when z < alpha.
"""

from .analytic import (
    cauchy_sld,
    gaussian_region_halfwidth,
    gaussian_sld,
    gaussian_threshold,
)
from .backend import BACKEND
from .errors import (
    DataError,
    DimensionMismatch,
    FactorizationError,
    InvalidParameter,
    NonFiniteInput,
    NumericError,
    SchemaError,
    SigdistError,
    TooFewPoints,
    UsageError,
    ZeroVariance,
)
from .estimator import (
    DEFAULT_RMSE_BUDGET,
    MAX_SAMPLE_COUNT,
    Classification,
    SldEstimator,
    Threshold,
    build_estimator,
    in_prediction_region,
    required_sample_count,
    theoretical_rmse,
)
from .experiments import (
    GaussianTruth,
    ReferenceTruth,
    RmseCell,
    RmseExperimentConfig,
    RmseExperimentResult,
    export_plot_data,
    run_rmse_experiment,
)
from .models import (
    DensityModel,
    GaussianModel,
    KdeModel,
    MixtureModel,
    fit_kde,
    load_model,
    model_from_dict,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Classification",
    "DEFAULT_RMSE_BUDGET",
    "DataError",
    "DensityModel",
    "DimensionMismatch",
    "FactorizationError",
    "GaussianModel",
    "GaussianTruth",
    "InvalidParameter",
    "KdeModel",
    "MAX_SAMPLE_COUNT",
    "MixtureModel",
    "NonFiniteInput",
    "NumericError",
    "ReferenceTruth",
    "RmseCell",
    "RmseExperimentConfig",
    "RmseExperimentResult",
    "SchemaError",
    "SigdistError",
    "SldEstimator",
    "Threshold",
    "TooFewPoints",
    "UsageError",
    "ZeroVariance",
    "build_estimator",
    "cauchy_sld",
    "export_plot_data",
    "fit_kde",
    "gaussian_region_halfwidth",
    "gaussian_sld",
    "gaussian_threshold",
    "in_prediction_region",
    "load_model",
    "model_from_dict",
    "required_sample_count",
    "run_rmse_experiment",
    "theoretical_rmse",
]
