#pragma once

#include "truncexp/errors.hpp"
#include "truncexp/stats.hpp"

// Closed-form quantities of the doubly-truncated exponential duration model.
//
// Durations X ~ Exponential(rate theta) start uniformly over a birth window
// of length g. A duration is observed only if it ends inside an observation
// window of length s that follows the unit's entry time t, i.e. if
// (x, t) lies in D = { 0 < t <= x <= t + s, t <= g }.

namespace truncexp {

// Truncation geometry plus the bound of the admissible rate interval
// [epsilon, 1/epsilon].
struct ModelConfig {
    double g = 0.0;        // birth-window length (> 0)
    double s = 0.0;        // observation-window length (> 0)
    double epsilon = 1e-6; // parameter-space bound, in (0, 1)

    void validate() const; // throws DomainError if any field is inadmissible
};

// Method selector for second_moment_truncated. ClosedForm evaluates a
// printed closed-form expression kept for reference; Quadrature integrates
// the marginal density and is the authoritative value (the closed form is
// known to disagree; see second_moment_truncated).
enum class SecondMomentMethod { ClosedForm, Quadrature };

// True iff the pair (duration x, entry time t) falls in the observable
// region D. Total on all real inputs; no exceptions.
bool in_region(const ModelConfig& cfg, double x, double t);

// Probability alpha(theta) that a latent unit is observed:
// (1 - e^{-theta s})(1 - e^{-theta g}) / (g theta), strictly inside (0, 1).
double selection_prob(const ModelConfig& cfg, double theta);

// First derivative of selection_prob in theta. Positive for small theta
// (selection first becomes more likely as the rate grows from zero) and
// negative once theta is large enough that short durations dominate.
double selection_prob_d1(const ModelConfig& cfg, double theta);

// Second derivative of selection_prob in theta.
double selection_prob_d2(const ModelConfig& cfg, double theta);

// Third derivative, by central finite differences of selection_prob_d2 with
// step max(1e-5, 1e-5 * theta); falls back to a one-sided second-order
// stencil when theta - h would leave the domain. Diagnostics only.
double selection_prob_d3(const ModelConfig& cfg, double theta);

// The score offset c(theta) = 1/theta - alpha'/alpha. The score of a sample
// is sum_x - m * c(theta). Decreasing in theta; for theta*(g+s) < 1e-6 the
// closed form is 0/0-prone and the exact limit (s+g)/2 is returned.
double offset_c(const ModelConfig& cfg, double theta);

// Joint density of an observed (x, t) pair: theta e^{-theta x} / (g alpha)
// on D, zero outside.
double joint_density(const ModelConfig& cfg, double theta, double x, double t);

// Marginal density of an observed duration on [0, g+s]: the joint density
// integrated over entry times, which weights x by the trapezoid
// w(x) = max(0, min(x, s, g, g+s-x)). Zero outside [0, g+s].
double marginal_density(const ModelConfig& cfg, double theta, double x);

// Conditional expectation of an observed duration. Uses the closed form
// (A e^{-theta s} + B e^{-theta g} + C e^{-theta (g+s)} + 2/(g theta^2)) / alpha;
// below theta*(g+s) = 0.05 the four terms cancel catastrophically and the
// function switches to offset_c, which equals this expectation identically.
double mean_truncated(const ModelConfig& cfg, double theta);

// Conditional second moment of an observed duration.
// SecondMomentMethod::Quadrature integrates x^2 against marginal_density and
// is authoritative. SecondMomentMethod::ClosedForm evaluates a reference
// closed-form expression that does not reproduce the quadrature value (its
// constant term lacks the 1/g scaling); it is retained verbatim so the
// discrepancy stays measurable.
double second_moment_truncated(const ModelConfig& cfg, double theta,
                               SecondMomentMethod method);

// Log-likelihood of (theta, n) given the observed count m and duration sum:
// m log(theta) - theta sum_x + m log(n) - n alpha(theta).
// Additive terms free of theta and n are dropped (a fixed normalization),
// so differences and derivatives are meaningful but absolute values are
// only defined up to that constant.
double log_likelihood(const ModelConfig& cfg, const SufficientStats& stats,
                      double theta, double n);

} // namespace truncexp
