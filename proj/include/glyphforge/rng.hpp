#pragma once

#include <cstdint>
#include <random>

namespace glyphforge {

// Seeded generator with a fully pinned output sequence. The engine is
// std::mt19937_64 (bit-exact across standard libraries); the mappings to
// ranges below are hand-rolled so no implementation-defined distribution
// sneaks into reproducible paths.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next();

    // Uniform integer in [0, n), n > 0. Multiply-shift mapping.
    std::uint64_t below(std::uint64_t n);

    // Uniform integer in [lo, hi] inclusive.
    long long range_int(long long lo, long long hi);

    // Uniform double in [0, 1) with 53 random bits.
    double unit();

    float range(float lo, float hi);

    // Derive an independent stream, e.g. one per dataset example, so
    // parallel generation stays order-independent.
    Rng fork(std::uint64_t stream) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used for seed derivation and stable hashing.
std::uint64_t mix64(std::uint64_t x);

} // namespace glyphforge
