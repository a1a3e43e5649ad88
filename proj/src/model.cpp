#include "truncexp/model.hpp"

#include <algorithm>
#include <cmath>

#include "truncexp/numerics.hpp"

namespace truncexp {

namespace {

void require_rate(const ModelConfig& cfg, double theta) {
    cfg.validate();
    if (!(theta > 0.0)) {
        throw DomainError("rate parameter theta must be positive");
    }
}

} // namespace

void ModelConfig::validate() const {
    if (!(g > 0.0)) {
        throw DomainError("birth-window length g must be positive");
    }
    if (!(s > 0.0)) {
        throw DomainError("observation-window length s must be positive");
    }
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw DomainError("epsilon must lie strictly between 0 and 1");
    }
}

void SufficientStats::validate() const {
    if (m < 0) {
        throw DomainError("observed count m cannot be negative");
    }
    if (!(sum_x >= 0.0)) {
        throw DomainError("sum of durations cannot be negative");
    }
    if (sum_x2 && !(*sum_x2 >= 0.0)) {
        throw DomainError("sum of squared durations cannot be negative");
    }
    if (m == 0 && (sum_x != 0.0 || (sum_x2 && *sum_x2 != 0.0))) {
        throw DomainError("zero observations cannot have nonzero duration sums");
    }
}

SufficientStats SufficientStats::from_durations(const std::vector<double>& xs) {
    SufficientStats st;
    st.m = static_cast<std::int64_t>(xs.size());
    double sx = 0.0, sx2 = 0.0;
    for (double x : xs) {
        sx += x;
        sx2 += x * x;
    }
    st.sum_x = sx;
    st.sum_x2 = sx2;
    return st;
}

bool in_region(const ModelConfig& cfg, double x, double t) {
    return t > 0.0 && t <= x && x <= t + cfg.s && t <= cfg.g;
}

double selection_prob(const ModelConfig& cfg, double theta) {
    require_rate(cfg, theta);
    const double a = theta * cfg.s;
    const double b = theta * cfg.g;
    return numerics::one_minus_exp(a) * numerics::one_minus_exp(b) / b;
}

double selection_prob_d1(const ModelConfig& cfg, double theta) {
    require_rate(cfg, theta);
    const double a = theta * cfg.s;
    const double b = theta * cfg.g;
    const double slope =
        (numerics::u_ratio(a) + numerics::u_ratio(b) - 1.0) / theta;
    return selection_prob(cfg, theta) * slope;
}

double selection_prob_d2(const ModelConfig& cfg, double theta) {
    require_rate(cfg, theta);
    const double a = theta * cfg.s;
    const double b = theta * cfg.g;
    const double usum = numerics::u_ratio(a) + numerics::u_ratio(b) - 1.0;
    const double slope = usum / theta; // logarithmic derivative of alpha
    const double slope_d1 =
        (a * numerics::u_ratio_d1(a) + b * numerics::u_ratio_d1(b) - usum) /
        (theta * theta);
    return selection_prob(cfg, theta) * (slope * slope + slope_d1);
}

double selection_prob_d3(const ModelConfig& cfg, double theta) {
    require_rate(cfg, theta);
    const double h = std::max(1e-5, 1e-5 * theta);
    if (theta - h > 0.0) {
        return (selection_prob_d2(cfg, theta + h) -
                selection_prob_d2(cfg, theta - h)) /
               (2.0 * h);
    }
    // One-sided second-order stencil keeps the evaluations inside theta > 0.
    return (-3.0 * selection_prob_d2(cfg, theta) +
            4.0 * selection_prob_d2(cfg, theta + h) -
            selection_prob_d2(cfg, theta + 2.0 * h)) /
           (2.0 * h);
}

double offset_c(const ModelConfig& cfg, double theta) {
    require_rate(cfg, theta);
    const double a = theta * cfg.s;
    const double b = theta * cfg.g;
    if (a + b < 1e-6) {
        // The closed form is a 0/0 limit here; its value is the midpoint of
        // the support of the flat-exponential marginal.
        return 0.5 * (cfg.s + cfg.g);
    }
    return -(numerics::u_ratio_m1(a) + numerics::u_ratio_m1(b)) / theta;
}

double joint_density(const ModelConfig& cfg, double theta, double x, double t) {
    require_rate(cfg, theta);
    if (!in_region(cfg, x, t)) {
        return 0.0;
    }
    return theta * std::exp(-theta * x) / (cfg.g * selection_prob(cfg, theta));
}

double marginal_density(const ModelConfig& cfg, double theta, double x) {
    require_rate(cfg, theta);
    if (!(x >= 0.0) || x > cfg.g + cfg.s) {
        return 0.0;
    }
    const double w =
        std::max(0.0, std::min({x, cfg.s, cfg.g, cfg.g + cfg.s - x}));
    return theta * std::exp(-theta * x) * w /
           (cfg.g * selection_prob(cfg, theta));
}

double mean_truncated(const ModelConfig& cfg, double theta) {
    require_rate(cfg, theta);
    const double g = cfg.g;
    const double s = cfg.s;
    if (theta * (g + s) < 0.05) {
        // The four closed-form terms cancel catastrophically for small
        // rates. The conditional mean equals the score offset identically,
        // and that form is stable all the way down to theta -> 0.
        return offset_c(cfg, theta);
    }
    const double th = theta;
    const double gth = g * th;
    const double gth2 = g * th * th;
    const double A = -s / gth - 2.0 / gth2;
    const double B = -1.0 / th - 2.0 / gth2;
    const double C = (g + s) / gth + 2.0 / gth2;
    const double scaled = A * std::exp(-th * s) + B * std::exp(-th * g) +
                          C * std::exp(-th * (g + s)) + 2.0 / gth2;
    return scaled / selection_prob(cfg, theta);
}

double second_moment_truncated(const ModelConfig& cfg, double theta,
                               SecondMomentMethod method) {
    require_rate(cfg, theta);
    const double g = cfg.g;
    const double s = cfg.s;
    if (method == SecondMomentMethod::ClosedForm) {
        // Reference expression, kept exactly as published elsewhere. It does
        // not agree with the quadrature value (the trailing constant and the
        // coefficient tails lack the 1/g scaling), which is why Quadrature
        // is the authoritative method.
        const double th = theta;
        const double th2 = th * th;
        const double th3 = th2 * th;
        const double Aq = -s * s / (g * th) - s / (6.0 * th2) - 1.0 / (4.0 * th3);
        const double Bq = -g / th - 4.0 / th2 - 1.0 / (4.0 * th3);
        const double Cq = (g + s) * (g + s) / (g * th) +
                          (g + s) / (6.0 * th2) + 1.0 / (4.0 * th3);
        return Aq * std::exp(-th * s) + Bq * std::exp(-th * g) +
               Cq * std::exp(-th * (g + s)) + 1.0 / (4.0 * th3);
    }

    // Integrate x^2 against the marginal density. The weight has kinks at
    // min(s,g) and max(s,g), so each smooth piece gets its own composite
    // rule; the exponential tail is clipped where it has fully decayed.
    const double scale = theta / (g * selection_prob(cfg, theta));
    const auto f = [&](double x) {
        const double w = std::max(0.0, std::min({x, s, g, g + s - x}));
        return x * x * std::exp(-theta * x) * w * scale;
    };
    const double xmax = std::min(g + s, 45.0 / theta);
    const double cut1 = std::min(s, g);
    const double cut2 = std::max(s, g);
    double total = 0.0;
    double lo = 0.0;
    for (double hi : {std::min(cut1, xmax), std::min(cut2, xmax), xmax}) {
        if (hi > lo) {
            const int panels = 1 + static_cast<int>(theta * (hi - lo) / 10.0);
            total += numerics::gauss_legendre(f, lo, hi, panels);
            lo = hi;
        }
    }
    return total;
}

double log_likelihood(const ModelConfig& cfg, const SufficientStats& stats,
                      double theta, double n) {
    require_rate(cfg, theta);
    stats.validate();
    if (!(n > 0.0)) {
        throw DomainError("latent sample size n must be positive");
    }
    const double m = static_cast<double>(stats.m);
    return m * std::log(theta) - theta * stats.sum_x + m * std::log(n) -
           n * selection_prob(cfg, theta);
}

} // namespace truncexp
