#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace tsetlin {

/// 64-bit finalizer from SplitMix64. Used to derive independent sub-seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Stream tags keep seeds for different purposes (data, splits, training)
/// from colliding when their indices coincide.
enum class SeedStream : std::uint64_t {
    Training = 0x747261696e,
    Data = 0x64617461,
    Split = 0x73706c6974,
};

/// seed' = mix(mix(mix(mix(base) ^ stream) ^ a) ^ b)
///
/// Adding runs or splits never changes the seeds of existing ones, since each
/// sub-seed depends only on its own coordinates.
constexpr std::uint64_t derive_seed(std::uint64_t base, SeedStream stream,
                                    std::uint64_t a, std::uint64_t b = 0) noexcept {
    std::uint64_t h = splitmix64(base);
    h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
    h = splitmix64(h ^ a);
    return splitmix64(h ^ b);
}

/// Seeded generator with platform-independent derived draws.
///
/// std::mt19937_64 output is fully specified by the standard, but the
/// standard distributions are not, so uniform/bounded draws and shuffling are
/// done here by hand to keep results bit-identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform double in [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// True with probability p; p <= 0 never fires, p >= 1 always fires.
    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, bound). bound must be nonzero.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t reject_under = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= reject_under) return r % bound;
        }
    }

    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace tsetlin
