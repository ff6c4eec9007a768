"""Community-outcome regression with residualized factor adaptation.

Thin wrapper over the compiled core; see the README for the model families
and the experiment harness.
"""

from ._core import (  # noqa: F401
    ConfigError,
    DataError,
    NumericError,
    adapt,
    fit_predict,
    generate_synthetic,
    interaction_factors,
    paired_t_test,
    pca_fit,
    pca_transform,
    pearson_r,
    r_squared,
    ridge_fit,
    ridge_predict,
    run_experiment,
    select_factors_rfe,
)

__all__ = [
    "ConfigError",
    "DataError",
    "NumericError",
    "adapt",
    "fit_predict",
    "generate_synthetic",
    "interaction_factors",
    "paired_t_test",
    "pca_fit",
    "pca_transform",
    "pearson_r",
    "r_squared",
    "ridge_fit",
    "ridge_predict",
    "run_experiment",
    "select_factors_rfe",
]
