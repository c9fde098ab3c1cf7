#pragma once

#include <cstdint>

namespace geomatch {

/// SplitMix64. Used for every seeded draw in the library so that runs replay
/// bit-identically across platforms and standard libraries. Index draws use
/// next() % n (the modulo bias is irrelevant at the sizes involved); unit
/// draws use the top 53 bits.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    std::uint64_t next_below(std::uint64_t n) { return next() % n; }
};

}  // namespace geomatch
