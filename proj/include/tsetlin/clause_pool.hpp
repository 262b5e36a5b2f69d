#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsetlin/clause.hpp"
#include "tsetlin/dataset.hpp"
#include "tsetlin/literals.hpp"
#include "tsetlin/random.hpp"

namespace tsetlin {

/// T_abs = max(1, round-half-up(T_rel * m)).
inline int absolute_threshold(double threshold_rel, std::size_t clause_count) {
    const double scaled = threshold_rel * static_cast<double>(clause_count);
    return std::max(1, static_cast<int>(std::floor(scaled + 0.5)));
}

/// Probability that a clause receives feedback for target y given the
/// clamped vote v in [-T, T].
constexpr double feedback_probability(int y, int clamped_vote, int threshold_abs) noexcept {
    const int numerator = y == 1 ? threshold_abs - clamped_vote : threshold_abs + clamped_vote;
    return static_cast<double>(numerator) / (2.0 * threshold_abs);
}

/// A binary Tsetlin machine: m clauses, half of each polarity, and a voting
/// target. Clauses [0, m/2) are positive, [m/2, m) negative.
class ClausePool {
public:
    /// One specificity per clause in each polarity group; both groups must
    /// have the same size.
    ClausePool(std::size_t feature_dim, std::span<const double> positive_specificity,
               std::span<const double> negative_specificity, double threshold_rel,
               int states_per_action = kDefaultStatesPerAction)
        : feature_dim_(feature_dim), threshold_rel_(threshold_rel) {
        if (positive_specificity.size() != negative_specificity.size()) {
            throw std::invalid_argument("polarity groups must have equal clause counts");
        }
        if (positive_specificity.empty()) throw std::invalid_argument("clause count must be >= 2");
        if (!(threshold_rel > 0.0 && threshold_rel <= 1.0)) {
            throw std::invalid_argument("relative threshold must lie in (0, 1], got " +
                                        std::to_string(threshold_rel));
        }
        clauses_.reserve(2 * positive_specificity.size());
        for (double s : positive_specificity) {
            clauses_.emplace_back(feature_dim, Polarity::Positive, s, states_per_action);
        }
        for (double s : negative_specificity) {
            clauses_.emplace_back(feature_dim, Polarity::Negative, s, states_per_action);
        }
        threshold_abs_ = absolute_threshold(threshold_rel_, clauses_.size());
    }

    /// Classic machine: one global specificity for all m clauses.
    static ClausePool classic(std::size_t feature_dim, std::size_t clause_count,
                              double specificity, double threshold_rel,
                              int states_per_action = kDefaultStatesPerAction) {
        if (clause_count < 2 || clause_count % 2 != 0) {
            throw std::invalid_argument("clause count must be even and >= 2, got " +
                                        std::to_string(clause_count));
        }
        const std::vector<double> s(clause_count / 2, specificity);
        return ClausePool(feature_dim, s, s, threshold_rel, states_per_action);
    }

    std::size_t feature_dim() const noexcept { return feature_dim_; }
    std::size_t clause_count() const noexcept { return clauses_.size(); }
    double threshold_rel() const noexcept { return threshold_rel_; }
    int threshold_abs() const noexcept { return threshold_abs_; }
    int states_per_action() const noexcept { return clauses_.front().states_per_action(); }

    std::span<const Clause> clauses() const noexcept { return clauses_; }
    Clause& clause(std::size_t j) { return clauses_.at(j); }
    const Clause& clause(std::size_t j) const { return clauses_.at(j); }

    int vote_sum(const LiteralVector& literals, EvalMode mode) const {
        check_dim(literals.feature_dim());
        int sum = 0;
        for (const Clause& c : clauses_) {
            if (c.evaluate_unchecked(literals, mode)) {
                sum += c.polarity() == Polarity::Positive ? 1 : -1;
            }
        }
        return sum;
    }

    int vote_sum(BitSpan input, EvalMode mode) const {
        return vote_sum(LiteralVector(input), mode);
    }

    /// 1 iff the inference vote sum is >= 0; a tie votes 1.
    int classify(BitSpan input) const { return vote_sum(input, EvalMode::Infer) >= 0 ? 1 : 0; }

    void train_on_example(BitSpan input, int y, Rng& rng) {
        if (y != 0 && y != 1) throw std::invalid_argument("binary target must be 0 or 1");
        const LiteralVector literals(input);
        check_dim(literals.feature_dim());

        outputs_.resize(clauses_.size());
        int sum = 0;
        for (std::size_t j = 0; j < clauses_.size(); ++j) {
            const bool c = clauses_[j].evaluate_unchecked(literals, EvalMode::Train);
            outputs_[j] = c;
            if (c) sum += clauses_[j].polarity() == Polarity::Positive ? 1 : -1;
        }
        const int v = std::clamp(sum, -threshold_abs_, threshold_abs_);
        const double p = feedback_probability(y, v, threshold_abs_);
        if (p <= 0.0) return;

        const Polarity rewarded = y == 1 ? Polarity::Positive : Polarity::Negative;
        for (std::size_t j = 0; j < clauses_.size(); ++j) {
            if (!rng.bernoulli(p)) continue;
            Clause& clause = clauses_[j];
            const FeedbackKind kind =
                clause.polarity() == rewarded ? FeedbackKind::TypeI : FeedbackKind::TypeII;
            clause.apply_feedback(kind, literals, outputs_[j], rng);
        }
    }

    /// One pass over `data` in an order shuffled by `rng`. Labels must be 0/1.
    void fit_epoch(const BinaryDataset& data, Rng& rng) {
        if (data.empty()) throw std::invalid_argument("cannot train on an empty dataset");
        check_dim(data.feature_dim());
        std::vector<std::size_t> order(data.rows());
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(std::span(order));
        for (std::size_t i : order) {
            train_on_example(data.row(i), static_cast<int>(data.label(i)), rng);
        }
    }

    friend bool operator==(const ClausePool& a, const ClausePool& b) {
        return a.feature_dim_ == b.feature_dim_ && a.threshold_rel_ == b.threshold_rel_ &&
               a.threshold_abs_ == b.threshold_abs_ && a.clauses_ == b.clauses_;
    }

private:
    void check_dim(std::size_t n) const {
        if (n != feature_dim_) {
            throw std::invalid_argument("input has " + std::to_string(n) +
                                        " features, machine expects " +
                                        std::to_string(feature_dim_));
        }
    }

    std::size_t feature_dim_;
    double threshold_rel_;
    int threshold_abs_ = 1;
    std::vector<Clause> clauses_;
    std::vector<char> outputs_;  // scratch
};

}  // namespace tsetlin
