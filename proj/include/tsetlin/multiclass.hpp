#pragma once

#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsetlin/clause_pool.hpp"
#include "tsetlin/dataset.hpp"
#include "tsetlin/random.hpp"

namespace tsetlin {

/// One-vs-rest ensemble: one ClausePool per class, argmax over vote sums.
class MultiClassClassifier {
public:
    MultiClassClassifier(std::vector<std::string> labels, std::vector<ClausePool> pools)
        : labels_(std::move(labels)), pools_(std::move(pools)) {
        if (labels_.size() != pools_.size()) {
            throw std::invalid_argument("need exactly one pool per class label");
        }
        for (const ClausePool& p : pools_) {
            if (p.feature_dim() != pools_.front().feature_dim() ||
                p.clause_count() != pools_.front().clause_count()) {
                throw std::invalid_argument("all pools must share feature dimension and clause count");
            }
        }
    }

    /// Builds one pool per label by calling make_pool().
    template <typename MakePool>
    static MultiClassClassifier build(std::vector<std::string> labels, MakePool&& make_pool) {
        std::vector<ClausePool> pools;
        pools.reserve(labels.size());
        for (std::size_t k = 0; k < labels.size(); ++k) pools.push_back(make_pool());
        return MultiClassClassifier(std::move(labels), std::move(pools));
    }

    std::size_t class_count() const noexcept { return pools_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    std::span<const ClausePool> pools() const noexcept { return pools_; }
    ClausePool& pool(std::size_t k) { return pools_.at(k); }
    std::size_t feature_dim() const {
        require_nonempty();
        return pools_.front().feature_dim();
    }

    std::vector<int> vote_sums(BitSpan input) const {
        require_nonempty();
        const LiteralVector literals(input);
        std::vector<int> sums;
        sums.reserve(pools_.size());
        for (const ClausePool& p : pools_) sums.push_back(p.vote_sum(literals, EvalMode::Infer));
        return sums;
    }

    /// Index of the class with the largest vote sum; ties go to the lowest index.
    std::size_t predict(BitSpan input) const {
        const auto sums = vote_sums(input);
        std::size_t best = 0;
        for (std::size_t k = 1; k < sums.size(); ++k) {
            if (sums[k] > sums[best]) best = k;
        }
        return best;
    }

    /// Pool `label` learns y=1; one other pool, uniformly drawn, learns y=0.
    void train_on_example(BitSpan input, std::size_t label, Rng& rng) {
        require_nonempty();
        if (label >= pools_.size()) {
            throw std::invalid_argument("label " + std::to_string(label) + " unknown to a " +
                                        std::to_string(pools_.size()) + "-class classifier");
        }
        pools_[label].train_on_example(input, 1, rng);
        if (pools_.size() < 2) return;
        std::size_t other = static_cast<std::size_t>(rng.below(pools_.size() - 1));
        if (other >= label) ++other;
        pools_[other].train_on_example(input, 0, rng);
    }

    void fit_epoch(const BinaryDataset& data, Rng& rng) {
        require_nonempty();
        if (data.empty()) throw std::invalid_argument("cannot train on an empty dataset");
        if (data.feature_dim() != feature_dim()) {
            throw std::invalid_argument("dataset dimension does not match classifier");
        }
        for (std::size_t label : data.labels()) {
            if (label >= pools_.size()) {
                throw std::invalid_argument("dataset label " + std::to_string(label) +
                                            " unknown to the classifier");
            }
        }
        std::vector<std::size_t> order(data.rows());
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(std::span(order));
        for (std::size_t i : order) train_on_example(data.row(i), data.label(i), rng);
    }

    friend bool operator==(const MultiClassClassifier&, const MultiClassClassifier&) = default;

private:
    void require_nonempty() const {
        if (pools_.empty()) throw std::logic_error("classifier has no classes");
    }

    std::vector<std::string> labels_;
    std::vector<ClausePool> pools_;
};

inline std::size_t classify_multi(const MultiClassClassifier& mc, BitSpan input) {
    return mc.predict(input);
}

inline void fit_multi(MultiClassClassifier& mc, const BinaryDataset& data, std::size_t epochs,
                      Rng& rng) {
    for (std::size_t e = 0; e < epochs; ++e) mc.fit_epoch(data, rng);
}

}  // namespace tsetlin
