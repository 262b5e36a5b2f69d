#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsetlin/automaton.hpp"
#include "tsetlin/clause_pool.hpp"

namespace tsetlin {

/// Closed interval [lower, upper] of per-clause specificities.
struct SpecificityRange {
    double lower = 2.0;
    double upper = 200.0;

    void validate() const {
        if (!(lower >= 1.0 && lower <= upper)) {
            throw std::invalid_argument("specificity range must satisfy 1 <= lower <= upper, got [" +
                                        std::to_string(lower) + ", " + std::to_string(upper) +
                                        "]");
        }
    }

    friend bool operator==(const SpecificityRange&, const SpecificityRange&) = default;
};

/// s_j = (u - l) * (m - j) / (m - 1) + l for j = 1..m: linear from u down to l.
inline std::vector<double> specificity_schedule(std::size_t count, const SpecificityRange& range) {
    range.validate();
    if (count < 2) {
        throw std::invalid_argument("specificity schedule needs at least 2 clauses, got " +
                                    std::to_string(count));
    }
    std::vector<double> s(count);
    const double span = range.upper - range.lower;
    const double denom = static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        // i = j - 1, so (m - j) = count - 1 - i
        s[i] = span * (static_cast<double>(count - 1 - i) / denom) + range.lower;
    }
    // (u - l) + l can be off by an ulp
    s.front() = range.upper;
    s.back() = range.lower;
    return s;
}

/// Multigranular pool: each polarity group carries the full schedule over
/// m/2 clauses, so no global specificity exists.
inline ClausePool build_mtm(std::size_t clause_count, double threshold_rel, std::size_t feature_dim,
                            const SpecificityRange& range = {},
                            int states_per_action = kDefaultStatesPerAction) {
    if (clause_count % 2 != 0) {
        throw std::invalid_argument("clause count must be even, got " +
                                    std::to_string(clause_count));
    }
    const auto schedule = specificity_schedule(clause_count / 2, range);
    return ClausePool(feature_dim, schedule, schedule, threshold_rel, states_per_action);
}

}  // namespace tsetlin
