"""Penalized and unpenalized logistic regression for binary designs."""

from .cv import CvResult, binomial_deviance, cv_select, stratified_folds
from .fisher import contingency, fisher_exact, table_pvalue
from .solver import (
    CoefficientVector,
    Design,
    PathResult,
    PenaltySpec,
    fit_penalized,
    kkt_residual,
    lambda_max,
    path,
    penalized_objective,
)
from .wald import WaldFit, fit_wald, logistic_mle

__all__ = [
    "CoefficientVector",
    "CvResult",
    "Design",
    "PathResult",
    "PenaltySpec",
    "WaldFit",
    "binomial_deviance",
    "contingency",
    "cv_select",
    "fisher_exact",
    "fit_penalized",
    "fit_wald",
    "kkt_residual",
    "lambda_max",
    "logistic_mle",
    "path",
    "penalized_objective",
    "stratified_folds",
    "table_pvalue",
]
