"""Data-driven decision methods (SAA, bagging, kernel smoothing, MLE, Bayes)
and the benchmark harness that compares them."""

from ._saabench import (
    SaabenchError,
    bag_decision,
    builtin_costs,
    builtin_covariances,
    config_json,
    describe_builtins,
    expected_cost,
    fit_scaled_beta,
    kernel_bandwidth,
    kernel_decision,
    min_variance_weights,
    paired_improvement,
    run_experiment,
    run_experiment_csv,
    saa_decision,
    sample_moments,
    validate_config,
    version,
)

__version__ = version()

__all__ = [
    "SaabenchError",
    "bag_decision",
    "builtin_costs",
    "builtin_covariances",
    "config_json",
    "describe_builtins",
    "expected_cost",
    "fit_scaled_beta",
    "kernel_bandwidth",
    "kernel_decision",
    "min_variance_weights",
    "paired_improvement",
    "run_experiment",
    "run_experiment_csv",
    "saa_decision",
    "sample_moments",
    "validate_config",
    "version",
]
