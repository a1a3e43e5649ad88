#include "truncexp/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "truncexp/numerics.hpp"

namespace truncexp {

double psi(const ModelConfig& cfg, double theta, double x, bool observed) {
    if (!observed) {
        // Still validate so that psi is usable as a domain check.
        cfg.validate();
        if (!(theta > 0.0)) {
            throw DomainError("rate parameter theta must be positive");
        }
        return 0.0;
    }
    return x - offset_c(cfg, theta);
}

double psi_d1(const ModelConfig& cfg, double theta) {
    cfg.validate();
    if (!(theta > 0.0)) {
        throw DomainError("rate parameter theta must be positive");
    }
    const double a = theta * cfg.s;
    const double b = theta * cfg.g;
    // (2 - q(a) - q(b)) / theta^2, computed through q-1 so the small-theta
    // cancellation is exact; the limit is (s^2 + g^2)/12.
    return -(numerics::q_ratio_m1(a) + numerics::q_ratio_m1(b)) /
           (theta * theta);
}

double score(const ModelConfig& cfg, const SufficientStats& stats,
             double theta) {
    stats.validate();
    return stats.sum_x - static_cast<double>(stats.m) * offset_c(cfg, theta);
}

double boundary_diagnostic(const ModelConfig& cfg,
                           const SufficientStats& stats) {
    cfg.validate();
    stats.validate();
    return static_cast<double>(stats.m) * 0.5 * (cfg.s + cfg.g) - stats.sum_x;
}

FitResult fit_mle(const ModelConfig& cfg, const SufficientStats& stats) {
    cfg.validate();
    stats.validate();
    if (stats.m == 0) {
        throw NoDataError("cannot estimate a rate from zero observed durations");
    }
    const double lo = cfg.epsilon;
    const double hi = 1.0 / cfg.epsilon;
    const double m = static_cast<double>(stats.m);

    // The score is nondecreasing in theta. If it is already positive at the
    // lower end (respectively still negative at the upper end), the
    // likelihood has no interior stationary point and the maximizer is the
    // endpoint itself.
    if (score(cfg, stats, lo) > 0.0) {
        return {lo, Boundary::Lower, m / selection_prob(cfg, lo)};
    }
    if (score(cfg, stats, hi) < 0.0) {
        return {hi, Boundary::Upper, m / selection_prob(cfg, hi)};
    }

    double a = lo;
    double b = hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) {
            break; // interval has collapsed to floating-point resolution
        }
        if (score(cfg, stats, mid) < 0.0) {
            a = mid;
        } else {
            b = mid;
        }
        if (b - a <= 1e-12 * mid) {
            break;
        }
    }
    const double root = 0.5 * (a + b);
    if (!std::isfinite(root)) {
        throw NumericalError("root search for the score failed");
    }
    return {root, Boundary::None, m / selection_prob(cfg, root)};
}

double estimate_se(const ModelConfig& cfg, const SufficientStats& stats,
                   double theta_hat) {
    cfg.validate();
    stats.validate();
    if (stats.m == 0) {
        throw NoDataError("cannot estimate a standard error from zero observations");
    }
    if (!stats.sum_x2) {
        throw DomainError(
            "the sum of squared durations is required for a standard error");
    }
    const double m = static_cast<double>(stats.m);
    const double c = offset_c(cfg, theta_hat);
    double sum_psi2 = *stats.sum_x2 - 2.0 * c * stats.sum_x + m * c * c;
    if (sum_psi2 < 0.0) {
        // Mathematically sum (x - c)^2 >= 0; a tiny negative value is
        // rounding noise, anything larger means the supplied statistics
        // cannot come from one sample.
        const double noise =
            1e-12 * std::max({*stats.sum_x2, m * c * c, 1.0});
        if (sum_psi2 < -noise) {
            throw InconsistentStatsError(
                "inconsistent sufficient statistics: m * sum_x2 < sum_x^2 "
                "violates the Cauchy-Schwarz inequality, so the pooled "
                "squared residual is negative; sum_x2 is likely misrecorded "
                "or over-rounded");
        }
        sum_psi2 = 0.0;
    }
    return std::sqrt(sum_psi2) / (m * psi_d1(cfg, theta_hat));
}

std::pair<double, double> fit_srs(const SufficientStats& stats) {
    stats.validate();
    if (stats.m == 0) {
        throw NoDataError("cannot estimate a rate from zero observed durations");
    }
    if (!(stats.sum_x > 0.0)) {
        throw DegenerateDataError(
            "all observed durations are zero; the rate estimate diverges");
    }
    const double m = static_cast<double>(stats.m);
    return {m / stats.sum_x, std::sqrt(m) / stats.sum_x};
}

double vif_hat(double se_hat, double se_srs) {
    if (!(se_srs > 0.0)) {
        throw DomainError("the srs standard error must be positive");
    }
    const double r = se_hat / se_srs;
    return r * r;
}

EstimateReport estimate(const ModelConfig& cfg, const SufficientStats& stats) {
    EstimateReport rep;
    const FitResult fit = fit_mle(cfg, stats);
    rep.theta_hat = fit.theta_hat;
    rep.boundary = fit.boundary;
    rep.n_hat = fit.n_hat;
    rep.boundary_diag = boundary_diagnostic(cfg, stats);
    const auto [theta_srs, se_srs] = fit_srs(stats);
    rep.theta_srs = theta_srs;
    rep.se_srs = se_srs;
    if (fit.boundary == Boundary::None && stats.sum_x2) {
        rep.se_hat = estimate_se(cfg, stats, fit.theta_hat);
        rep.vif_hat = vif_hat(*rep.se_hat, rep.se_srs);
    }
    return rep;
}

} // namespace truncexp
