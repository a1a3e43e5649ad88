#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "truncexp/estimator.hpp"
#include "truncexp/model.hpp"
#include "truncexp/sampling.hpp"

// Replicated simulation scenarios: generate a latent sample, truncate it,
// estimate, and aggregate bias, the average estimated asymptotic variance,
// the empirical variance of the estimates, and the mean variance-inflation
// factor.

namespace truncexp {

struct SimulationScenario {
    double theta0 = 0.0;       // true rate used to generate data
    ModelConfig cfg{};         // truncation geometry
    std::int64_t n = 0;        // latent sample size per replication
    int replications = 0;      // number of replications R
    std::uint64_t master_seed = 0;
};

struct ReplicationRecord {
    double theta_hat = 0.0;
    std::optional<double> se_hat{};
    std::optional<double> vif_hat{};
    Boundary boundary = Boundary::None;
    std::int64_t m = 0;
    bool empty = false; // replication produced zero observations
};

struct SimulationReport {
    // Mean of (theta_hat - theta0) over non-empty replications, boundary
    // pins included (a pinned estimate is still the estimate).
    double mean_bias = 0.0;
    // Mean of n * se_hat^2 over replications with a standard error, i.e. the
    // average estimated asymptotic variance. NaN if no replication had one.
    double mean_sigma2_hat = 0.0;
    // n times the empirical variance of theta_hat over non-empty
    // replications (denominator R-1); 0 with fewer than two of them.
    double n_var_sim = 0.0;
    // Mean variance-inflation factor over replications that had one.
    double mean_vif = 0.0;
    std::int64_t boundary_count = 0;
    std::int64_t empty_count = 0;
    int replications = 0;
    // Per-replication records, filled only when requested.
    std::vector<ReplicationRecord> records{};
};

// One replication: draw n latent pairs keyed by (master_seed, v), truncate,
// fit, and attach the standard error and variance-inflation factor when the
// estimate is interior. Throws NoDataError if the replication is empty.
ReplicationRecord run_replication(const SimulationScenario& scenario,
                                  std::uint64_t v);

// Runs all replications (in parallel when threads != 1) and aggregates.
// Replication v is keyed by (master_seed, v) alone and the reduction is done
// in index order with compensated summation, so the report is bit-identical
// for any thread count. Empty replications are counted and excluded from the
// aggregates. Throws ScenarioFailedError if every replication is empty.
// threads = 0 picks the hardware concurrency.
SimulationReport run_scenario(const SimulationScenario& scenario,
                              bool keep_records = false, int threads = 0);

// One report per latent size in n_list, all under the same master seed so
// the sizes are compared on common random numbers.
std::vector<SimulationReport> convergence_sweep(double theta0,
                                                const ModelConfig& cfg,
                                                const std::vector<std::int64_t>& n_list,
                                                int replications,
                                                std::uint64_t master_seed,
                                                int threads = 0);

} // namespace truncexp
