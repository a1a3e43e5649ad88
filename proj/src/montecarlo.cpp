#include "truncexp/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace truncexp {

namespace {

void validate_scenario(const SimulationScenario& scn) {
    scn.cfg.validate();
    if (!(scn.theta0 > scn.cfg.epsilon &&
          scn.theta0 < 1.0 / scn.cfg.epsilon)) {
        throw DomainError("theta0 must lie strictly inside [epsilon, 1/epsilon]");
    }
    if (scn.n < 1) {
        throw DomainError("latent sample size n must be at least 1");
    }
    if (scn.replications < 1) {
        throw DomainError("replication count must be at least 1");
    }
}

// Compensated (Kahan) accumulator: keeps the sequential reductions below
// reproducible to the last bit regardless of how many replications there are.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

} // namespace

ReplicationRecord run_replication(const SimulationScenario& scenario,
                                  std::uint64_t v) {
    validate_scenario(scenario);
    const LatentSample latent =
        draw_latent(scenario.cfg, scenario.theta0, scenario.n,
                    SeedSpec{scenario.master_seed, v});
    const TruncatedSample observed = truncate(scenario.cfg, latent);

    ReplicationRecord rec;
    rec.m = observed.m();
    const SufficientStats st = observed.stats(); // throws nothing; m may be 0
    const FitResult fit = fit_mle(scenario.cfg, st); // NoDataError if m == 0
    rec.theta_hat = fit.theta_hat;
    rec.boundary = fit.boundary;
    if (fit.boundary == Boundary::None) {
        rec.se_hat = estimate_se(scenario.cfg, st, fit.theta_hat);
        const auto [theta_srs, se_srs] = fit_srs(st);
        (void)theta_srs;
        rec.vif_hat = vif_hat(*rec.se_hat, se_srs);
    }
    return rec;
}

SimulationReport run_scenario(const SimulationScenario& scenario,
                              bool keep_records, int threads) {
    validate_scenario(scenario);
    const int R = scenario.replications;
    std::vector<ReplicationRecord> records(static_cast<std::size_t>(R));

    if (threads <= 0) {
        threads = static_cast<int>(std::thread::hardware_concurrency());
        if (threads < 1) {
            threads = 1;
        }
    }
    threads = std::min(threads, R);

    // Each worker pulls the next replication index; record v depends only on
    // (scenario, v), so the filled vector is identical for any schedule.
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&]() {
        for (;;) {
            const int v = next.fetch_add(1);
            if (v >= R) {
                return;
            }
            try {
                records[static_cast<std::size_t>(v)] =
                    run_replication(scenario, static_cast<std::uint64_t>(v));
            } catch (const NoDataError&) {
                records[static_cast<std::size_t>(v)].empty = true;
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
                return;
            }
        }
    };

    if (threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int i = 0; i < threads; ++i) {
            pool.emplace_back(work);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }

    // Sequential, index-ordered reduction.
    SimulationReport rep;
    rep.replications = R;
    KahanSum bias, sigma2, vif;
    std::int64_t n_used = 0, n_se = 0, n_vif = 0;
    for (const ReplicationRecord& r : records) {
        if (r.empty) {
            ++rep.empty_count;
            continue;
        }
        ++n_used;
        bias.add(r.theta_hat - scenario.theta0);
        if (r.boundary != Boundary::None) {
            ++rep.boundary_count;
        }
        if (r.se_hat) {
            sigma2.add(static_cast<double>(scenario.n) * *r.se_hat * *r.se_hat);
            ++n_se;
        }
        if (r.vif_hat) {
            vif.add(*r.vif_hat);
            ++n_vif;
        }
    }
    if (n_used == 0) {
        throw ScenarioFailedError(
            "every replication of the scenario produced zero observations");
    }
    rep.mean_bias = bias.sum / static_cast<double>(n_used);

    // Two-pass variance of theta_hat over the non-empty replications.
    const double theta_mean = rep.mean_bias + scenario.theta0;
    if (n_used >= 2) {
        KahanSum ss;
        for (const ReplicationRecord& r : records) {
            if (!r.empty) {
                const double d = r.theta_hat - theta_mean;
                ss.add(d * d);
            }
        }
        rep.n_var_sim = static_cast<double>(scenario.n) * ss.sum /
                        static_cast<double>(n_used - 1);
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rep.mean_sigma2_hat = n_se > 0 ? sigma2.sum / static_cast<double>(n_se) : nan;
    rep.mean_vif = n_vif > 0 ? vif.sum / static_cast<double>(n_vif) : nan;
    if (keep_records) {
        rep.records = std::move(records);
    }
    return rep;
}

std::vector<SimulationReport> convergence_sweep(
    double theta0, const ModelConfig& cfg,
    const std::vector<std::int64_t>& n_list, int replications,
    std::uint64_t master_seed, int threads) {
    if (n_list.empty()) {
        throw DomainError("the list of latent sample sizes must not be empty");
    }
    std::vector<SimulationReport> out;
    out.reserve(n_list.size());
    for (std::int64_t n : n_list) {
        SimulationScenario scn{theta0, cfg, n, replications, master_seed};
        out.push_back(run_scenario(scn, false, threads));
    }
    return out;
}

} // namespace truncexp
