#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "tsetlin/dataset.hpp"
#include "tsetlin/errors.hpp"
#include "tsetlin/random.hpp"

namespace tsetlin {

// ---------------------------------------------------------------------------
// Fixed-point binarization
// ---------------------------------------------------------------------------

struct FixedPointEncoding {
    std::size_t int_bits = 3;
    std::size_t frac_bits = 2;

    std::size_t width() const noexcept { return int_bits + frac_bits; }

    void validate() const {
        if (width() < 1) throw std::invalid_argument("fixed-point encoding needs at least one bit");
        if (int_bits > 32 || frac_bits > 32) {
            throw std::invalid_argument("fixed-point fields are limited to 32 bits each");
        }
    }

    friend bool operator==(const FixedPointEncoding&, const FixedPointEncoding&) = default;
};

struct EncodedValue {
    std::vector<std::uint8_t> bits;  ///< int_bits then frac_bits, each big-endian
    bool saturated = false;          ///< integer part exceeded int_bits
};

/// Integer part big-endian in int_bits (saturating), then
/// floor(frac(x) * 2^frac_bits) big-endian in frac_bits.
inline EncodedValue binarize_value(double x, const FixedPointEncoding& enc) {
    enc.validate();
    if (!(x >= 0.0) || !std::isfinite(x)) {
        throw std::invalid_argument("cannot binarize negative or non-finite value " +
                                    std::to_string(x));
    }
    EncodedValue out;
    out.bits.reserve(enc.width());

    const double whole = std::floor(x);
    const std::uint64_t int_max = (std::uint64_t{1} << enc.int_bits) - 1;
    std::uint64_t int_part = 0;
    if (whole > static_cast<double>(int_max)) {
        int_part = int_max;
        out.saturated = true;
    } else {
        int_part = static_cast<std::uint64_t>(whole);
    }
    const std::uint64_t frac_part = static_cast<std::uint64_t>(
        std::floor((x - whole) * static_cast<double>(std::uint64_t{1} << enc.frac_bits)));

    for (std::size_t b = enc.int_bits; b-- > 0;) out.bits.push_back((int_part >> b) & 1U);
    for (std::size_t b = enc.frac_bits; b-- > 0;) out.bits.push_back((frac_part >> b) & 1U);
    return out;
}

/// Inverse of binarize_value for values it represents exactly.
inline double decode_value(std::span<const std::uint8_t> bits, const FixedPointEncoding& enc) {
    if (bits.size() != enc.width()) throw std::invalid_argument("bit width does not match encoding");
    std::uint64_t raw = 0;
    for (std::uint8_t b : bits) raw = (raw << 1) | (b & 1U);
    return static_cast<double>(raw) / static_cast<double>(std::uint64_t{1} << enc.frac_bits);
}

// ---------------------------------------------------------------------------
// Iris
// ---------------------------------------------------------------------------

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_fields(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        fields.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    return in;
}

}  // namespace detail

/// Reads UCI-layout Iris rows ("f1,f2,f3,f4,class"). Classes are numbered
/// in order of first appearance; blank lines are skipped.
inline BinaryDataset parse_iris(std::istream& in, const FixedPointEncoding& enc = {},
                                std::ostream* warnings = &std::cerr) {
    enc.validate();
    constexpr std::size_t kFeatures = 4;
    std::vector<std::uint8_t> bits;
    std::vector<std::size_t> labels;
    std::vector<std::string> names;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_fields(line, ',');
        if (fields.size() != kFeatures + 1) {
            throw ParseError(line_no, "expected 5 comma-separated columns, found " +
                                          std::to_string(fields.size()));
        }
        for (std::size_t f = 0; f < kFeatures; ++f) {
            double value = 0.0;
            const auto field = fields[f];
            const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
            if (ec != std::errc{} || ptr != field.data() + field.size()) {
                throw ParseError(line_no, "column " + std::to_string(f + 1) + ": '" +
                                              std::string(field) + "' is not a number");
            }
            if (value < 0.0) {
                throw ParseError(line_no, "column " + std::to_string(f + 1) + " is negative");
            }
            const auto encoded = binarize_value(value, enc);
            if (encoded.saturated && warnings) {
                *warnings << "warning: line " << line_no << ": value " << value
                          << " exceeds the " << enc.int_bits << "-bit integer range; saturated\n";
            }
            bits.insert(bits.end(), encoded.bits.begin(), encoded.bits.end());
        }
        const std::string name(fields[kFeatures]);
        if (name.empty()) throw ParseError(line_no, "missing class name");
        std::size_t label = 0;
        while (label < names.size() && names[label] != name) ++label;
        if (label == names.size()) names.push_back(name);
        labels.push_back(label);
    }
    if (labels.empty()) throw FormatError("Iris input contains no rows");
    return BinaryDataset(kFeatures * enc.width(), std::move(bits), std::move(labels),
                         std::move(names));
}

inline BinaryDataset load_iris(const std::string& path, const FixedPointEncoding& enc = {}) {
    auto in = detail::open_input(path);
    try {
        return parse_iris(in, enc);
    } catch (const ParseError& e) {
        throw e.in_file(path);
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Synthetic mixed-granularity problem
// ---------------------------------------------------------------------------

/// Which reading of the mixed-granularity problem to generate.
///
/// SixVariable: x1..x6; y = x2 when x1 = 0, else y = x2 ^ x3 ^ x4 ^ x5 ^ x6.
/// SevenVariable: x1..x7; y = x2 when x1 = 0, else y = x3 ^ x4 ^ x5 ^ x6 ^ x7,
/// which leaves x2 irrelevant inside the parity half.
///
/// Both layouts put the four patterns (not-x1 and x2, not-x1 and not-x2, and
/// the two parity classes under x1) at roughly 25% mass each.
enum class SyntheticLayout : std::uint8_t { SixVariable = 6, SevenVariable = 7 };

constexpr std::size_t synthetic_features(SyntheticLayout layout) noexcept {
    return static_cast<std::size_t>(layout);
}

/// Label of `x` (x1 at index 0) under the given layout.
constexpr std::size_t synthetic_label(std::span<const std::uint8_t> x, SyntheticLayout layout) {
    if (x.size() != synthetic_features(layout)) {
        throw std::invalid_argument("synthetic input has the wrong number of variables");
    }
    if (x[0] == 0) return x[1];
    const std::size_t first = layout == SyntheticLayout::SixVariable ? 1 : 2;
    std::size_t parity = 0;
    for (std::size_t k = first; k < x.size(); ++k) parity ^= x[k];
    return parity;
}

/// `count` examples drawn uniformly from {0,1}^n; noise-free labels.
inline BinaryDataset generate_synthetic(std::size_t count, Rng& rng,
                                        SyntheticLayout layout = SyntheticLayout::SixVariable) {
    if (count < 1) throw std::invalid_argument("synthetic dataset needs at least one example");
    const std::size_t n = synthetic_features(layout);
    std::vector<std::uint8_t> bits(count * n);
    std::vector<std::size_t> labels(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t draw = rng.next();
        const std::span<std::uint8_t> row(bits.data() + i * n, n);
        for (std::size_t k = 0; k < n; ++k) row[k] = (draw >> k) & 1U;
        labels[i] = synthetic_label(row, layout);
    }
    return BinaryDataset(n, std::move(bits), std::move(labels));
}

// ---------------------------------------------------------------------------
// Splitting
// ---------------------------------------------------------------------------

/// Random partition into (train, test); train gets round(rows * (1 - f)).
inline std::pair<BinaryDataset, BinaryDataset> split(const BinaryDataset& ds, double test_fraction,
                                                     Rng& rng) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw std::invalid_argument("test fraction must lie in (0, 1)");
    }
    const auto train_rows = static_cast<std::size_t>(
        std::llround(static_cast<double>(ds.rows()) * (1.0 - test_fraction)));
    if (train_rows == 0 || train_rows >= ds.rows()) {
        throw std::invalid_argument("split of " + std::to_string(ds.rows()) +
                                    " rows leaves one side empty");
    }
    std::vector<std::size_t> order(ds.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span(order));
    const std::span<const std::size_t> all(order);
    return {ds.subset(all.first(train_rows)), ds.subset(all.subspan(train_rows))};
}

// ---------------------------------------------------------------------------
// Text fixtures: one row per line, n '0'/'1' characters, a space, the label.
// ---------------------------------------------------------------------------

inline void write_fixture(std::ostream& out, const BinaryDataset& ds) {
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        for (std::uint8_t b : ds.row(i)) out.put(b ? '1' : '0');
        out << ' ' << ds.label(i) << '\n';
    }
}

inline BinaryDataset read_fixture(std::istream& in) {
    std::vector<std::uint8_t> bits;
    std::vector<std::size_t> labels;
    std::size_t dim = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = detail::trim(line);
        if (text.empty()) continue;
        const auto space = text.find(' ');
        if (space == std::string_view::npos) throw ParseError(line_no, "expected '<bits> <label>'");
        const auto row = text.substr(0, space);
        const auto label_text = detail::trim(text.substr(space + 1));
        if (dim == 0) dim = row.size();
        if (row.size() != dim) {
            throw ParseError(line_no, "row has " + std::to_string(row.size()) +
                                          " bits, expected " + std::to_string(dim));
        }
        for (char c : row) {
            if (c != '0' && c != '1') throw ParseError(line_no, "bits must be '0' or '1'");
            bits.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        std::size_t label = 0;
        const auto [ptr, ec] =
            std::from_chars(label_text.data(), label_text.data() + label_text.size(), label);
        if (ec != std::errc{} || ptr != label_text.data() + label_text.size()) {
            throw ParseError(line_no, "label '" + std::string(label_text) + "' is not an integer");
        }
        labels.push_back(label);
    }
    if (labels.empty()) throw FormatError("dataset fixture contains no rows");
    return BinaryDataset(dim, std::move(bits), std::move(labels));
}

inline void save_fixture(const std::string& path, const BinaryDataset& ds) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_fixture(out, ds);
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline BinaryDataset load_fixture(const std::string& path) {
    auto in = detail::open_input(path);
    try {
        return read_fixture(in);
    } catch (const ParseError& e) {
        throw e.in_file(path);
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

}  // namespace tsetlin
