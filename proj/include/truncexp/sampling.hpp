#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "truncexp/model.hpp"
#include "truncexp/stats.hpp"

// Random generation of latent (duration, entry time) pairs, their truncation
// to the observable region, and a Poisson-count variant that samples the
// observed pairs directly from their conditional law.
//
// All draws are deterministic functions of a SeedSpec and are reproducible
// across platforms: the uniform, exponential and Poisson transforms are
// implemented here rather than with std::<distribution> types, whose output
// sequences the standard leaves implementation-defined.

namespace truncexp {

// Identifies one reproducible random stream. Distinct replication indices
// yield statistically independent streams under the same master seed.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t replication_index = 0;
};

// The n latent pairs (x_j, t_j) that exist before truncation.
struct LatentSample {
    std::vector<std::pair<double, double>> pairs; // (duration, entry time)

    std::int64_t n() const { return static_cast<std::int64_t>(pairs.size()); }
};

// The observed pairs after truncation, in latent order.
struct TruncatedSample {
    std::vector<std::pair<double, double>> pairs; // (duration, entry time)
    std::int64_t n_latent = -1;                   // latent size if known, else -1

    std::int64_t m() const { return static_cast<std::int64_t>(pairs.size()); }
    SufficientStats stats() const;
};

// Scrambles (master_seed, replication_index) into one 64-bit stream seed.
std::uint64_t derive_stream_seed(const SeedSpec& seed);

// Engine primed for the given stream.
std::mt19937_64 make_engine(const SeedSpec& seed);

// Uniform draw on [0, 1) with 53-bit resolution.
double uniform01(std::mt19937_64& eng);

// Exponential draw with the given rate, by inversion.
double exponential_draw(std::mt19937_64& eng, double rate);

// Poisson draw. Product-of-uniforms for small means; larger means are split
// into a sum of independent small-mean Poisson draws, which is exact.
std::int64_t poisson_draw(std::mt19937_64& eng, double mean);

// n independent latent pairs: duration ~ Exponential(theta0), entry time
// ~ Uniform[0, g], mutually independent.
LatentSample draw_latent(const ModelConfig& cfg, double theta0, std::int64_t n,
                         const SeedSpec& seed);

// Keeps exactly the latent pairs that fall in the observable region,
// preserving order.
TruncatedSample truncate(const ModelConfig& cfg, const LatentSample& latent);

// Draws the observed count Z ~ Poisson(n * alpha) and then Z pairs from the
// conditional law of an observed pair, by rejection: the duration proposal
// is Exponential(theta0) conditioned to [0, g+s] (inverse CDF), the entry
// time proposal is Uniform[0, g], and proposals are accepted when they land
// in the observable region. Z = 0 yields an empty sample.
TruncatedSample draw_truncated_poisson(const ModelConfig& cfg, double theta0,
                                       std::int64_t n, const SeedSpec& seed);

} // namespace truncexp
