#pragma once

#include <cstdint>
#include <random>

namespace nugate {

// SplitMix64 finalizer. Used to derive independent stream seeds from a
// master seed and a counter.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Deterministic random source for measurement sampling.
///
/// Built on std::mt19937_64, whose output sequence is fixed by the standard,
/// and converts to doubles by hand so the stream is identical on every
/// platform (std::uniform_real_distribution is not).
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

    /// Stream number `index` derived from `master`. Distinct indices give
    /// statistically independent streams.
    static Rng split(std::uint64_t master, std::uint64_t index) {
        return Rng(splitmix64(master ^ splitmix64(index + 1)));
    }

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Lemire-free rejection; n is small everywhere we use it.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return r % n;
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace nugate
