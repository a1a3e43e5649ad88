"""Rate estimation for exponential durations observed under double truncation.

Durations are observed only when they start inside a recruitment window and
end inside a fixed follow-up window, which over-represents short durations.
This package fits the rate by maximum likelihood under that selection scheme,
quantifies the efficiency loss against a design that samples durations
directly, and provides the simulation machinery to study both.
"""

from ._core import (
    __version__,
    # errors
    Error,
    DomainError,
    DataError,
    NoDataError,
    DegenerateDataError,
    InconsistentStatsError,
    ConfigParseError,
    ScenarioFailedError,
    NumericalError,
    # types
    ModelConfig,
    SufficientStats,
    Boundary,
    FitResult,
    EstimateReport,
    LatentSample,
    TruncatedSample,
    SimulationScenario,
    ReplicationRecord,
    SimulationReport,
    # model
    in_region,
    selection_prob,
    selection_prob_d1,
    selection_prob_d2,
    selection_prob_d3,
    offset_c,
    joint_density,
    marginal_density,
    mean_truncated,
    second_moment_truncated,
    log_likelihood,
    # sampling
    draw_latent,
    truncate,
    draw_truncated_poisson,
    # estimator
    psi,
    psi_d1,
    score,
    boundary_diagnostic,
    fit_mle,
    estimate_se,
    fit_srs,
    vif_hat,
    estimate,
    # monte carlo
    run_replication,
    run_scenario,
    convergence_sweep,
)

__all__ = [
    "__version__",
    "Error",
    "DomainError",
    "DataError",
    "NoDataError",
    "DegenerateDataError",
    "InconsistentStatsError",
    "ConfigParseError",
    "ScenarioFailedError",
    "NumericalError",
    "ModelConfig",
    "SufficientStats",
    "Boundary",
    "FitResult",
    "EstimateReport",
    "LatentSample",
    "TruncatedSample",
    "SimulationScenario",
    "ReplicationRecord",
    "SimulationReport",
    "in_region",
    "selection_prob",
    "selection_prob_d1",
    "selection_prob_d2",
    "selection_prob_d3",
    "offset_c",
    "joint_density",
    "marginal_density",
    "mean_truncated",
    "second_moment_truncated",
    "log_likelihood",
    "draw_latent",
    "truncate",
    "draw_truncated_poisson",
    "psi",
    "psi_d1",
    "score",
    "boundary_diagnostic",
    "fit_mle",
    "estimate_se",
    "fit_srs",
    "vif_hat",
    "estimate",
    "run_replication",
    "run_scenario",
    "convergence_sweep",
]
