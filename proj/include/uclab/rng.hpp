#pragma once

#include <cstdint>
#include <random>

namespace uclab {

// splitmix64; used to derive independent substreams from (seed, index).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Deterministic per-job stream: jobs are independent of thread scheduling.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t job) {
    std::uint64_t s = seed ^ (0xA0761D6478BD642Full * (job + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

// Uniform double in [0,1) with 53 random bits; avoids the (implementation
// defined) std::uniform_real_distribution so streams are portable.
inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

}  // namespace uclab
