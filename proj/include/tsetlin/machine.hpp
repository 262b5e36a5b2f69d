#pragma once

#include <cstddef>
#include <type_traits>
#include <variant>

#include "tsetlin/clause_pool.hpp"
#include "tsetlin/dataset.hpp"
#include "tsetlin/multiclass.hpp"

namespace tsetlin {

/// A trained model: a single pool for two-class data, an ensemble otherwise.
using Machine = std::variant<ClausePool, MultiClassClassifier>;

inline std::size_t predict(const Machine& machine, BitSpan input) {
    return std::visit(
        [&](const auto& m) -> std::size_t {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, ClausePool>) {
                return static_cast<std::size_t>(m.classify(input));
            } else {
                return m.predict(input);
            }
        },
        machine);
}

inline std::size_t feature_dim(const Machine& machine) {
    return std::visit([](const auto& m) { return m.feature_dim(); }, machine);
}

inline void fit_epoch(Machine& machine, const BinaryDataset& data, Rng& rng) {
    std::visit([&](auto& m) { m.fit_epoch(data, rng); }, machine);
}

/// Exact-match rate over `data`.
inline double accuracy(const Machine& machine, const BinaryDataset& data) {
    if (data.empty()) throw std::invalid_argument("cannot score an empty dataset");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        hits += predict(machine, data.row(i)) == data.label(i);
    }
    return static_cast<double>(hits) / static_cast<double>(data.rows());
}

}  // namespace tsetlin
