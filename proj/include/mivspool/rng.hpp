#pragma once

#include <cstdint>

namespace mivspool::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
    return splitmix64(seed ^ splitmix64(salt + 0x632BE59BD9B4E019ull));
}

// Counter-based uniform draw: value depends only on (seed, counter), not on
// evaluation order, so concurrent callers see identical streams.
inline double uniform01(std::uint64_t seed, std::uint64_t counter) {
    return static_cast<double>(mix(seed, counter) >> 11) * 0x1.0p-53;
}

// Sequential stream for bulk sampling (edge generation, permutations). The
// seed is scattered once so that streams from adjacent seeds do not overlap.
struct Stream {
    std::uint64_t state;

    explicit Stream(std::uint64_t seed) : state(splitmix64(seed)) {}

    std::uint64_t next() { return splitmix64(state++); }
    double next01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, bound) via rejection-free scaling; bound > 0
    std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }
};

}  // namespace mivspool::rng
