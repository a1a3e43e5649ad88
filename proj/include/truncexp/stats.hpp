#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "truncexp/errors.hpp"

namespace truncexp {

// Everything estimation needs from the observed durations. The pair
// (m, sum_x) determines the point estimate; sum_x2 is additionally needed
// for the standard error and may therefore be absent.
struct SufficientStats {
    std::int64_t m = 0;             // number of observed durations
    double sum_x = 0.0;             // sum of observed durations
    std::optional<double> sum_x2{}; // sum of squared observed durations

    // Throws DomainError on impossible combinations (negative counts or
    // sums, or nonzero sums with zero observations). Deliberately does not
    // check the Cauchy-Schwarz relation between sum_x and sum_x2: rounded
    // published statistics can violate it, and the point estimate is still
    // well defined then. The violation surfaces in estimate_se instead.
    void validate() const;

    static SufficientStats from_durations(const std::vector<double>& xs);
};

} // namespace truncexp
