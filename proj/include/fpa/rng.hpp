#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fpa {

// SplitMix64 finalizer; used to derive well-mixed seeds from small keys.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Folds a base seed and a list of keys into one 64-bit seed. Every distinct
// key tuple maps to a distinct stream for all practical purposes.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = splitmix64(base);
    for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k));
    return h;
}

// Deterministic uniform stream. mt19937_64 output is fully specified by the
// standard and the [0,1) mapping below avoids std::uniform_real_distribution,
// whose output is implementation-defined. Single-owner: callers that run in
// parallel must each hold their own stream.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : eng_(seed) {}

    // Uniform draw on [0,1) with 53 random bits.
    double next_uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    std::uint64_t next_u64() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

// Stream tags keeping environment draws separate from strategy-internal draws.
inline constexpr std::uint64_t kEnvStreamTag = 0x656E76u;       // "env"
inline constexpr std::uint64_t kStrategyStreamTag = 0x737472u;  // "str"
inline constexpr std::uint64_t kRepStreamTag = 0x726570u;       // "rep"

}  // namespace fpa
