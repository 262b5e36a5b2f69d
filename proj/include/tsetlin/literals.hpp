#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsetlin {

/// Binary input vector: one byte per feature, each 0 or 1.
using BitSpan = std::span<const std::uint8_t>;

inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for(std::size_t bits) noexcept {
    return (bits + kWordBits - 1) / kWordBits;
}

/// The 2n literal values of an input, packed into 64-bit words.
///
/// Literal 2k is x_k and literal 2k+1 is not-x_k, matching the automaton
/// layout inside a clause.
class LiteralVector {
public:
    explicit LiteralVector(BitSpan input)
        : feature_dim_(input.size()), words_(words_for(2 * input.size()), 0) {
        for (std::size_t k = 0; k < input.size(); ++k) {
            const std::uint8_t x = input[k];
            if (x > 1) {
                throw std::invalid_argument("input feature " + std::to_string(k) +
                                            " is not 0 or 1");
            }
            const std::size_t literal = 2 * k + (x ? 0 : 1);
            words_[literal / kWordBits] |= std::uint64_t{1} << (literal % kWordBits);
        }
    }

    std::size_t feature_dim() const noexcept { return feature_dim_; }
    std::size_t literal_count() const noexcept { return 2 * feature_dim_; }

    bool operator[](std::size_t literal) const noexcept {
        return (words_[literal / kWordBits] >> (literal % kWordBits)) & 1U;
    }

    std::span<const std::uint64_t> words() const noexcept { return words_; }

private:
    std::size_t feature_dim_;
    std::vector<std::uint64_t> words_;
};

}  // namespace tsetlin
