"""Predictive density estimators and the point estimators they are built on."""
from .explicit import (
    ExpLocationMre,
    ImpossibleDataError,
    UniformMre,
    exp_location_mre,
    uniform_mre,
    uniform_mre_from_sample,
    uniform_mre_kernel,
)
from .point import (
    Baranchik,
    Identity,
    JamesStein,
    LinearShrink,
    PointEstimator,
    PositivePartJS,
    RestrictedBayesUniform,
    RestrictedMle,
    point_estimate,
    register_shrinkage_function,
    validate_shrinkage_function,
)
from .predictive import PredictiveDensity, eval_predictive, mre_estimator, normal_prior_bayes, plugin
from .restricted import PosteriorError, RestrictedBayesTable, restricted_bayes_point, restricted_mle

__all__ = [
    "Baranchik",
    "ExpLocationMre",
    "Identity",
    "ImpossibleDataError",
    "JamesStein",
    "LinearShrink",
    "PointEstimator",
    "PositivePartJS",
    "PosteriorError",
    "PredictiveDensity",
    "RestrictedBayesTable",
    "RestrictedBayesUniform",
    "RestrictedMle",
    "UniformMre",
    "eval_predictive",
    "exp_location_mre",
    "mre_estimator",
    "normal_prior_bayes",
    "plugin",
    "point_estimate",
    "register_shrinkage_function",
    "restricted_bayes_point",
    "restricted_mle",
    "uniform_mre",
    "uniform_mre_from_sample",
    "uniform_mre_kernel",
    "validate_shrinkage_function",
]
