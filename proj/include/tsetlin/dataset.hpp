#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsetlin/literals.hpp"

namespace tsetlin {

/// Immutable table of binary feature rows and integer class labels.
class BinaryDataset {
public:
    BinaryDataset() = default;

    /// `bits` is row-major, rows x feature_dim, each entry 0 or 1.
    BinaryDataset(std::size_t feature_dim, std::vector<std::uint8_t> bits,
                  std::vector<std::size_t> labels, std::vector<std::string> label_names = {})
        : feature_dim_(feature_dim),
          bits_(std::move(bits)),
          labels_(std::move(labels)),
          label_names_(std::move(label_names)) {
        if (feature_dim_ == 0) throw std::invalid_argument("dataset feature dimension must be >= 1");
        if (bits_.size() != labels_.size() * feature_dim_) {
            throw std::invalid_argument("dataset has " + std::to_string(labels_.size()) +
                                        " labels but " + std::to_string(bits_.size()) +
                                        " bits for dimension " + std::to_string(feature_dim_));
        }
        if (std::any_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b > 1; })) {
            throw std::invalid_argument("dataset bits must be 0 or 1");
        }
        const std::size_t max_label =
            labels_.empty() ? 0 : *std::max_element(labels_.begin(), labels_.end());
        if (!label_names_.empty() && !labels_.empty() && max_label >= label_names_.size()) {
            throw std::invalid_argument("label " + std::to_string(max_label) +
                                        " has no name (" + std::to_string(label_names_.size()) +
                                        " classes)");
        }
        class_count_ = label_names_.empty() ? (labels_.empty() ? 0 : max_label + 1)
                                            : label_names_.size();
    }

    std::size_t rows() const noexcept { return labels_.size(); }
    bool empty() const noexcept { return labels_.empty(); }
    std::size_t feature_dim() const noexcept { return feature_dim_; }
    std::size_t class_count() const noexcept { return class_count_; }

    BitSpan row(std::size_t i) const {
        return BitSpan(bits_).subspan(i * feature_dim_, feature_dim_);
    }
    std::size_t label(std::size_t i) const { return labels_.at(i); }

    std::span<const std::size_t> labels() const noexcept { return labels_; }
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    const std::vector<std::string>& label_names() const noexcept { return label_names_; }

    /// Rows in the given order; label names carry over.
    BinaryDataset subset(std::span<const std::size_t> indices) const {
        std::vector<std::uint8_t> bits;
        std::vector<std::size_t> labels;
        bits.reserve(indices.size() * feature_dim_);
        labels.reserve(indices.size());
        for (std::size_t i : indices) {
            if (i >= rows()) throw std::out_of_range("subset index out of range");
            const auto r = row(i);
            bits.insert(bits.end(), r.begin(), r.end());
            labels.push_back(labels_[i]);
        }
        BinaryDataset out(feature_dim_, std::move(bits), std::move(labels), label_names_);
        out.class_count_ = std::max(out.class_count_, class_count_);
        return out;
    }

    friend bool operator==(const BinaryDataset&, const BinaryDataset&) = default;

private:
    std::size_t feature_dim_ = 0;
    std::vector<std::uint8_t> bits_;
    std::vector<std::size_t> labels_;
    std::vector<std::string> label_names_;
    std::size_t class_count_ = 0;
};

}  // namespace tsetlin
