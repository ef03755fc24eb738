"""Instrumental-variable estimators with spectral regularization.

Thin python surface over the C++ core: data generation, OLS/2SLS and
regularized 2SLS estimators, many-instruments diagnostics, and the Monte
Carlo scenario runner.
"""

from ivspectral._core import (
    CauchyGapReport,
    CellStats,
    ConfigError,
    DataError,
    Dataset,
    DgpConfig,
    EffectiveCountReport,
    EigenSystem,
    EstimatorResult,
    InstrumentDesign,
    NumericError,
    PiScheme,
    RegularizationScheme,
    ReplicationStats,
    ScenarioConfig,
    SpectrumReport,
    __version__,
    assumption3_checks,
    covariance_spectrum,
    default_k_grid,
    effective_count,
    eigensystem_of_gram,
    filter_factors,
    generate_instruments,
    materialize_pi,
    ols,
    projection_apply,
    q_sequence,
    run_scenario,
    select_alpha,
    simulate_dataset,
    summarize,
    tsls,
    tsls_regularized,
)

__all__ = [
    "CauchyGapReport",
    "CellStats",
    "ConfigError",
    "DataError",
    "Dataset",
    "DgpConfig",
    "EffectiveCountReport",
    "EigenSystem",
    "EstimatorResult",
    "InstrumentDesign",
    "NumericError",
    "PiScheme",
    "RegularizationScheme",
    "ReplicationStats",
    "ScenarioConfig",
    "SpectrumReport",
    "__version__",
    "assumption3_checks",
    "covariance_spectrum",
    "default_k_grid",
    "effective_count",
    "eigensystem_of_gram",
    "filter_factors",
    "generate_instruments",
    "materialize_pi",
    "ols",
    "projection_apply",
    "q_sequence",
    "run_scenario",
    "select_alpha",
    "simulate_dataset",
    "summarize",
    "tsls",
    "tsls_regularized",
]
