"""Transductive conformal inference and its large-sample calculus.

Finite-sample (weighted) conformal p-values and prediction thresholds, the
step-function calculus behind the false coverage proportion (FCP) process
and the step-up multiple-testing procedure, the corresponding asymptotic
theory (Kolmogorov-calibrated uniform bands, pointwise FCP confidence
intervals under distribution shift, FDP/TDP limit moments), limit-process
sampling, and a seeded Monte Carlo harness.
"""

from .conformal import (conformal_pvalues, prediction_threshold, standardize,
                        weighted_conformal_pvalues, weighted_quantile)
from .distributions import (Exponential, Normal, ScoreDistribution, Uniform01,
                            distribution_from_json, distribution_to_json)
from .empirical import (BhOutcome, LabeledPValues, StepFunction, bh_reject,
                        ecdf, fdp_tdp, reference_In, sup_deviation)
from .errors import (AssumptionViolationError, ConfigurationError,
                     ConformalError, DegenerateWeightsError, DomainError,
                     SubcriticalAlphaError, TieError)
from .estimators import BHNoveltyDetector, ConformalPValues
from .limit_sampler import (GridPath, LimitKind, SupQuantile, default_grid,
                            limit_sup_quantile, sample_brownian_bridge,
                            sample_limit_process)
from .limits import (AsymptoticRegime, ScenarioSpec, TheoryFunctions,
                     bh_asymptotic_threshold, fcp_pointwise_ci,
                     fcp_uniform_band, fdp_tdp_asymptotics, kolmogorov_cdf,
                     kolmogorov_quantile, tau, theory_functions)
from .rng import SeededRng
from .simulate import (ExperimentConfig, ExperimentResult, empirical_quantile,
                       reproduce_fig1, reproduce_fig2, run_bh_experiment,
                       run_experiment, run_fcp_experiment, write_result)
from .weights import (ConstantWeight, ExpTiltWeight, OracleRatioWeight,
                      TableWeight, WeightFunction, oracle_weight,
                      weight_from_json, weight_to_json)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticRegime", "AssumptionViolationError", "BHNoveltyDetector",
    "BhOutcome", "ConfigurationError", "ConformalError", "ConformalPValues",
    "ConstantWeight", "DegenerateWeightsError", "DomainError",
    "ExperimentConfig", "ExperimentResult", "Exponential", "ExpTiltWeight",
    "GridPath", "LabeledPValues", "LimitKind", "Normal", "OracleRatioWeight",
    "ScenarioSpec", "ScoreDistribution", "SeededRng", "StepFunction",
    "SubcriticalAlphaError", "SupQuantile", "TableWeight", "TheoryFunctions",
    "TieError", "Uniform01", "WeightFunction", "bh_asymptotic_threshold",
    "bh_reject", "conformal_pvalues", "default_grid",
    "distribution_from_json", "distribution_to_json", "ecdf",
    "empirical_quantile", "fcp_pointwise_ci", "fcp_uniform_band", "fdp_tdp",
    "fdp_tdp_asymptotics", "kolmogorov_cdf", "kolmogorov_quantile",
    "limit_sup_quantile", "oracle_weight", "prediction_threshold",
    "reference_In", "reproduce_fig1", "reproduce_fig2", "run_bh_experiment",
    "run_experiment", "run_fcp_experiment", "sample_brownian_bridge",
    "sample_limit_process", "standardize", "sup_deviation", "tau",
    "theory_functions", "weight_from_json", "weight_to_json",
    "weighted_conformal_pvalues", "weighted_quantile", "write_result",
]
