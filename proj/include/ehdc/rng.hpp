#pragma once

#include <array>
#include <cstdint>

namespace ehdc {

// Splittable counter-seeded generator: a (seed, stream) pair names an
// independent xoshiro256** instance whose state is filled by a SplitMix64
// chain. Identical (seed, stream) gives an identical sequence on every
// platform; see tests/test_rng.cpp for frozen vectors.
class SplittableRng {
public:
    explicit SplittableRng(std::uint64_t seed, std::uint64_t stream = 0);

    // Derive a child generator for a named substream without perturbing
    // this one.
    SplittableRng split(std::uint64_t stream) const;

    std::uint64_t next_u64();

    // Uniform in [0, 1), 53-bit mantissa.
    double next_double();

    // Uniform in [0, n).
    std::uint64_t next_below(std::uint64_t n);

    bool next_bit() { return (next_u64() >> 63) != 0; }

    // Standard normal via Box-Muller (two uniforms per pair, cached).
    double next_gaussian();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    static std::uint64_t splitmix64(std::uint64_t& state);

private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::array<std::uint64_t, 4> state_{};
    double cached_gaussian_ = 0.0;
    bool has_cached_gaussian_ = false;
};

} // namespace ehdc
