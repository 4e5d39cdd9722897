// Copyright 2026 the hnmfk authors.
// SPDX-License-Identifier: Apache-2.0
//
// Seed mixing and uniform draws. Ensemble members derive their seeds by
// mixing the base seed with structural indices, so any parallel schedule
// reproduces the sequential result bit for bit.

#ifndef HNMFK_RNG_HPP
#define HNMFK_RNG_HPP

#include <cstdint>
#include <random>

namespace hnmfk {

/// splitmix64 finalizer; good avalanche for combining seed components.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a) {
    return mix64(base ^ mix64(a));
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return mix_seed(mix_seed(base, a), b);
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                              std::uint64_t c) {
    return mix_seed(mix_seed(base, a, b), c);
}

/// Deterministic uniform generator. Avoids std::uniform_real_distribution,
/// whose output sequence is not pinned by the standard.
class UniformRng {
  public:
    explicit UniformRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double next() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi).
    double next(double lo, double hi) { return lo + (hi - lo) * next(); }

    /// Uniform on (0, 1]; strictly positive.
    double next_positive() { return 1.0 - next(); }

    /// Uniform integer in [0, n).
    std::uint64_t next_index(std::uint64_t n) {
        // rejection sampling to avoid modulo bias
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace hnmfk

#endif  // HNMFK_RNG_HPP
