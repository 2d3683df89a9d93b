"""Bayesian hyperparameter search on a Gaussian-process surrogate."""

from .bo import (
    AcquisitionConfig,
    BoEntry,
    BoHistory,
    expected_improvement_plus,
    propose_next,
    run_bo,
)
from .gp import (
    GpSurrogate,
    SingularKernel,
    gp_fit,
    gp_posterior,
    log_marginal_likelihood,
    make_surrogate,
    matern52,
    with_output_var,
)
from .space import Dimension, OutOfBounds, SearchSpace, default_search_space

__all__ = [
    "AcquisitionConfig",
    "BoEntry",
    "BoHistory",
    "Dimension",
    "GpSurrogate",
    "OutOfBounds",
    "SearchSpace",
    "SingularKernel",
    "default_search_space",
    "expected_improvement_plus",
    "gp_fit",
    "gp_posterior",
    "log_marginal_likelihood",
    "make_surrogate",
    "matern52",
    "propose_next",
    "run_bo",
    "with_output_var",
]
