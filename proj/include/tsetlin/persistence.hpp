#pragma once

// Model file layout (all integers little-endian, reals IEEE-754 binary64):
//
//   magic        4 bytes  "TMMC"
//   version      u32      1
//   pool_count   u32      P
//   label_count  u32      L (0 for a two-class single-pool machine, else P)
//   labels       L x { u32 byte length, UTF-8 bytes }
//   P pool records, each:
//     n          u32      feature dimension
//     m          u32      clause count
//     N          u32      states per action
//     T_rel      f64      relative threshold
//     polarity   m x u8   1 = positive, 0 = negative
//     s          m x f64  per-clause specificity
//     states     2n*m x u32, clause-major; literal 2k = x_k, 2k+1 = not x_k
//
// See docs/model_format.md.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tsetlin/errors.hpp"
#include "tsetlin/machine.hpp"

namespace tsetlin {

inline constexpr std::array<char, 4> kModelMagic{'T', 'M', 'M', 'C'};
inline constexpr std::uint32_t kModelVersion = 1;

namespace detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
    const std::array<char, 4> b{static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                                static_cast<char>((v >> 16) & 0xFF),
                                static_cast<char>((v >> 24) & 0xFF)};
    out.write(b.data(), b.size());
}

inline void put_u64(std::ostream& out, std::uint64_t v) {
    put_u32(out, static_cast<std::uint32_t>(v));
    put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

inline void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

inline std::uint32_t get_u32(std::istream& in) {
    std::array<unsigned char, 4> b{};
    if (!in.read(reinterpret_cast<char*>(b.data()), b.size())) {
        throw FormatError("model file truncated");
    }
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline std::uint64_t get_u64(std::istream& in) {
    const std::uint64_t lo = get_u32(in);
    const std::uint64_t hi = get_u32(in);
    return lo | (hi << 32);
}

inline double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

inline std::uint32_t checked_u32(std::size_t v, const char* what) {
    if (v > std::numeric_limits<std::uint32_t>::max()) {
        throw std::length_error(std::string(what) + " does not fit in 32 bits");
    }
    return static_cast<std::uint32_t>(v);
}

inline void write_pool(std::ostream& out, const ClausePool& pool) {
    put_u32(out, checked_u32(pool.feature_dim(), "feature dimension"));
    put_u32(out, checked_u32(pool.clause_count(), "clause count"));
    put_u32(out, checked_u32(static_cast<std::size_t>(pool.states_per_action()), "N"));
    put_f64(out, pool.threshold_rel());
    for (const Clause& c : pool.clauses()) out.put(c.polarity() == Polarity::Positive ? 1 : 0);
    for (const Clause& c : pool.clauses()) put_f64(out, c.specificity());
    for (const Clause& c : pool.clauses()) {
        for (const TsetlinAutomaton& ta : c.automata()) {
            put_u32(out, static_cast<std::uint32_t>(ta.state()));
        }
    }
}

inline ClausePool read_pool(std::istream& in) {
    const std::uint32_t n = get_u32(in);
    const std::uint32_t m = get_u32(in);
    const std::uint32_t states_per_action = get_u32(in);
    const double threshold_rel = get_f64(in);
    if (n == 0 || m < 2 || m % 2 != 0) {
        throw FormatError("model pool has invalid shape n=" + std::to_string(n) +
                          " m=" + std::to_string(m));
    }
    if (states_per_action == 0 ||
        states_per_action > static_cast<std::uint32_t>(std::numeric_limits<std::int32_t>::max() / 2)) {
        throw FormatError("model pool has invalid states per action " +
                          std::to_string(states_per_action));
    }
    std::vector<std::uint8_t> polarity(m);
    for (auto& p : polarity) {
        const int byte = in.get();
        if (byte == std::char_traits<char>::eof()) throw FormatError("model file truncated");
        if (byte != 0 && byte != 1) throw FormatError("invalid polarity byte");
        p = static_cast<std::uint8_t>(byte);
    }
    std::vector<double> specificity(m);
    for (double& s : specificity) s = get_f64(in);

    // The pool keeps positives first; remember where each file clause lands.
    std::vector<double> pos_s, neg_s;
    std::vector<std::size_t> slot(m);
    for (std::uint32_t j = 0; j < m; ++j) {
        if (polarity[j]) {
            slot[j] = pos_s.size();
            pos_s.push_back(specificity[j]);
        } else {
            slot[j] = neg_s.size();
            neg_s.push_back(specificity[j]);
        }
    }
    if (pos_s.size() != neg_s.size()) throw FormatError("model pool polarity groups are unequal");
    for (std::uint32_t j = 0; j < m; ++j) {
        if (!polarity[j]) slot[j] += pos_s.size();
    }

    try {
        ClausePool pool(n, pos_s, neg_s, threshold_rel, static_cast<int>(states_per_action));
        for (std::uint32_t j = 0; j < m; ++j) {
            Clause& clause = pool.clause(slot[j]);
            for (std::size_t k = 0; k < 2 * std::size_t{n}; ++k) {
                clause.set_state(k, static_cast<std::int32_t>(get_u32(in)));
            }
        }
        return pool;
    } catch (const FormatError&) {
        throw;
    } catch (const std::exception& e) {
        throw FormatError(std::string("invalid model pool: ") + e.what());
    }
}

}  // namespace detail

inline void write_machine(std::ostream& out, const Machine& machine) {
    out.write(kModelMagic.data(), kModelMagic.size());
    detail::put_u32(out, kModelVersion);
    if (const auto* pool = std::get_if<ClausePool>(&machine)) {
        detail::put_u32(out, 1);
        detail::put_u32(out, 0);
        detail::write_pool(out, *pool);
        return;
    }
    const auto& mc = std::get<MultiClassClassifier>(machine);
    detail::put_u32(out, detail::checked_u32(mc.class_count(), "class count"));
    detail::put_u32(out, detail::checked_u32(mc.class_count(), "class count"));
    for (const std::string& label : mc.labels()) {
        detail::put_u32(out, detail::checked_u32(label.size(), "label length"));
        out.write(label.data(), static_cast<std::streamsize>(label.size()));
    }
    for (const ClausePool& pool : mc.pools()) detail::write_pool(out, pool);
}

inline Machine read_machine(std::istream& in) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kModelMagic) {
        throw FormatError("not a model file (bad magic)");
    }
    const std::uint32_t version = detail::get_u32(in);
    if (version != kModelVersion) {
        throw FormatError("unsupported model format version " + std::to_string(version));
    }
    const std::uint32_t pool_count = detail::get_u32(in);
    const std::uint32_t label_count = detail::get_u32(in);
    if (label_count == 0) {
        if (pool_count != 1) throw FormatError("unlabelled model must hold exactly one pool");
        return detail::read_pool(in);
    }
    if (label_count != pool_count) throw FormatError("label count does not match pool count");
    std::vector<std::string> labels;
    for (std::uint32_t k = 0; k < label_count; ++k) {
        const std::uint32_t len = detail::get_u32(in);
        if (len > (1U << 20)) throw FormatError("label too long");
        std::string label(len, '\0');
        if (!in.read(label.data(), len)) throw FormatError("model file truncated");
        labels.push_back(std::move(label));
    }
    std::vector<ClausePool> pools;
    for (std::uint32_t k = 0; k < pool_count; ++k) pools.push_back(detail::read_pool(in));
    try {
        return MultiClassClassifier(std::move(labels), std::move(pools));
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("invalid model: ") + e.what());
    }
}

inline void save_machine(const std::string& path, const Machine& machine) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_machine(out, machine);
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline Machine load_machine(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    try {
        return read_machine(in);
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

}  // namespace tsetlin
