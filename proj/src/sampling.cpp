#include "truncexp/sampling.hpp"

#include <cmath>

namespace truncexp {

SufficientStats TruncatedSample::stats() const {
    SufficientStats st;
    st.m = m();
    double sx = 0.0, sx2 = 0.0;
    for (const auto& [x, t] : pairs) {
        (void)t;
        sx += x;
        sx2 += x * x;
    }
    st.sum_x = sx;
    st.sum_x2 = sx2;
    return st;
}

std::uint64_t derive_stream_seed(const SeedSpec& seed) {
    // splitmix64 finalizer over a combination of master seed and index.
    // Mixing avoids the correlated engine states that raw seeds like
    // (42, 0), (42, 1), ... would produce.
    std::uint64_t z =
        seed.master_seed + 0x9e3779b97f4a7c15ULL * (seed.replication_index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::mt19937_64 make_engine(const SeedSpec& seed) {
    return std::mt19937_64(derive_stream_seed(seed));
}

double uniform01(std::mt19937_64& eng) {
    // Top 53 bits scaled into [0, 1); every value is exactly representable.
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

double exponential_draw(std::mt19937_64& eng, double rate) {
    // Inversion; log1p keeps full precision for small uniforms and the
    // result is finite because uniform01 never returns 1.
    return -std::log1p(-uniform01(eng)) / rate;
}

std::int64_t poisson_draw(std::mt19937_64& eng, double mean) {
    if (!(mean >= 0.0)) {
        throw DomainError("Poisson mean must be non-negative");
    }
    if (mean == 0.0) {
        return 0;
    }
    // Sum of independent Poisson draws is Poisson, so large means are split
    // into chunks small enough for the product-of-uniforms method (whose
    // running product stays far above the underflow threshold).
    const int chunks = 1 + static_cast<int>(mean / 30.0);
    const double chunk_mean = mean / chunks;
    const double limit = std::exp(-chunk_mean);
    std::int64_t total = 0;
    for (int c = 0; c < chunks; ++c) {
        double prod = 1.0;
        std::int64_t k = -1;
        do {
            prod *= uniform01(eng);
            ++k;
        } while (prod > limit);
        total += k;
    }
    return total;
}

LatentSample draw_latent(const ModelConfig& cfg, double theta0, std::int64_t n,
                         const SeedSpec& seed) {
    cfg.validate();
    if (!(theta0 > 0.0)) {
        throw DomainError("rate parameter theta0 must be positive");
    }
    if (n < 1) {
        throw DomainError("latent sample size n must be at least 1");
    }
    std::mt19937_64 eng = make_engine(seed);
    LatentSample sample;
    sample.pairs.reserve(static_cast<std::size_t>(n));
    for (std::int64_t j = 0; j < n; ++j) {
        const double x = exponential_draw(eng, theta0);
        const double t = cfg.g * uniform01(eng);
        sample.pairs.emplace_back(x, t);
    }
    return sample;
}

TruncatedSample truncate(const ModelConfig& cfg, const LatentSample& latent) {
    cfg.validate();
    TruncatedSample out;
    out.n_latent = latent.n();
    for (const auto& [x, t] : latent.pairs) {
        if (in_region(cfg, x, t)) {
            out.pairs.emplace_back(x, t);
        }
    }
    return out;
}

TruncatedSample draw_truncated_poisson(const ModelConfig& cfg, double theta0,
                                       std::int64_t n, const SeedSpec& seed) {
    cfg.validate();
    if (!(theta0 > 0.0)) {
        throw DomainError("rate parameter theta0 must be positive");
    }
    if (n < 1) {
        throw DomainError("latent sample size n must be at least 1");
    }
    std::mt19937_64 eng = make_engine(seed);
    const double alpha = selection_prob(cfg, theta0);
    const std::int64_t z = poisson_draw(eng, static_cast<double>(n) * alpha);

    TruncatedSample out;
    out.n_latent = n;
    out.pairs.reserve(static_cast<std::size_t>(z));
    // Proposal for the duration: Exponential(theta0) conditioned to the
    // support [0, g+s], drawn by inverse CDF.
    const double tail = std::expm1(-theta0 * (cfg.g + cfg.s));
    for (std::int64_t i = 0; i < z; ++i) {
        for (;;) {
            const double x = -std::log1p(uniform01(eng) * tail) / theta0;
            const double t = cfg.g * uniform01(eng);
            if (in_region(cfg, x, t)) {
                out.pairs.emplace_back(x, t);
                break;
            }
        }
    }
    return out;
}

} // namespace truncexp
