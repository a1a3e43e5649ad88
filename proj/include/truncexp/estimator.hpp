#pragma once

#include <optional>
#include <utility>

#include "truncexp/model.hpp"
#include "truncexp/stats.hpp"

// Score-based maximum likelihood estimation of the duration rate from
// doubly-truncated observations, with asymptotic standard errors, the naive
// simple-random-sample (srs) comparison fit that ignores truncation, and the
// variance-inflation factor between the two designs.

namespace truncexp {

// Where the maximizer of the likelihood landed: at an interior root of the
// score, or pinned at an endpoint of [epsilon, 1/epsilon].
enum class Boundary { None, Lower, Upper };

struct FitResult {
    double theta_hat = 0.0;
    Boundary boundary = Boundary::None;
    double n_hat = 0.0; // estimated latent sample size, m / alpha(theta_hat)
};

// The full estimation output for one data set.
struct EstimateReport {
    double theta_hat = 0.0;
    std::optional<double> se_hat{}; // absent without sum_x2 or at a boundary
    double n_hat = 0.0;
    double theta_srs = 0.0;
    double se_srs = 0.0;
    std::optional<double> vif_hat{}; // absent whenever se_hat is
    Boundary boundary = Boundary::None;
    double boundary_diag = 0.0; // m (s+g)/2 - sum_x; positive predicts no lower pin
};

// Per-observation score contribution: x - c(theta) if the unit was observed,
// zero otherwise.
double psi(const ModelConfig& cfg, double theta, double x, bool observed);

// Slope of the per-observation score in theta, for an observed unit:
// 2/theta^2 - s^2 e^{-theta s}/(1-e^{-theta s})^2 - g^2 e^{-theta g}/(1-e^{-theta g})^2.
// Strictly positive for every theta > 0; equals -d/dtheta offset_c.
double psi_d1(const ModelConfig& cfg, double theta);

// Aggregated score of the sample: sum_x - m * c(theta). Nondecreasing in
// theta, so it has at most one sign change.
double score(const ModelConfig& cfg, const SufficientStats& stats, double theta);

// Left-edge limit of the score: m (s+g)/2 - sum_x. A positive value means
// the score is already negative at theta -> 0+, so no lower-boundary maximum
// can occur.
double boundary_diagnostic(const ModelConfig& cfg, const SufficientStats& stats);

// Maximum likelihood estimate of the rate. If the score is positive at
// epsilon the maximizer is pinned there (Boundary::Lower); if it is negative
// at 1/epsilon it is pinned there (Boundary::Upper); otherwise the unique
// interior root is found by bisection to 1e-12 relative width.
// Throws NoDataError when m = 0.
FitResult fit_mle(const ModelConfig& cfg, const SufficientStats& stats);

// Asymptotic standard error of an interior estimate:
// sqrt(sum psi^2) / (m * psi_d1(theta_hat)), with
// sum psi^2 = sum_x2 - 2 c(theta_hat) sum_x + m c(theta_hat)^2.
// Note the hypothetical latent size cancels: only (m, sum_x, sum_x2) enter.
// Throws InconsistentStatsError if the inputs make sum psi^2 negative beyond
// rounding noise (a Cauchy-Schwarz violation), and DomainError if sum_x2 is
// absent.
double estimate_se(const ModelConfig& cfg, const SufficientStats& stats,
                   double theta_hat);

// The naive fit that treats the observed durations as a plain exponential
// random sample: point estimate m / sum_x with standard error sqrt(m) / sum_x.
// Throws DegenerateDataError when sum_x is zero.
std::pair<double, double> fit_srs(const SufficientStats& stats);

// Variance-inflation factor of the truncation-aware fit relative to the
// naive fit: (se_hat / se_srs)^2.
double vif_hat(double se_hat, double se_srs);

// Runs the whole pipeline on one data set: point estimate with boundary
// handling, standard error when sum_x2 is available and the estimate is
// interior, the srs comparison, and the variance-inflation factor.
// Propagates InconsistentStatsError from estimate_se.
EstimateReport estimate(const ModelConfig& cfg, const SufficientStats& stats);

} // namespace truncexp
