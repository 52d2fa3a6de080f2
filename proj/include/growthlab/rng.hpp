#pragma once

#include <cstdint>
#include <vector>

namespace growthlab {

/// Counter-based SplitMix64 stream. Output i depends only on (seed, i), so
/// fixtures are reproducible from the seed alone, in any language:
///   z = seed + (i+1) * 0x9E3779B97F4A7C15
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   out = z ^ (z >> 31)
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t at(std::uint64_t i) const {
        std::uint64_t z = seed_ + (i + 1) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next() { return at(counter_++); }

    /// Uniform in [0, bound), bound > 0. Modulo bias is irrelevant at the
    /// bounds used here (<= 2^40) and keeps the stream spec one-line.
    std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }

    /// Uniform in [0,1) with 53 bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

/// n distinct integers drawn from [lo, hi], ascending. Draws until n distinct
/// values have appeared; the counter advances once per draw.
std::vector<std::int64_t> random_distinct_integers(std::uint64_t seed, std::size_t n,
                                                   std::int64_t lo, std::int64_t hi);

} // namespace growthlab
