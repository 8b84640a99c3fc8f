#pragma once

#include <cstdint>
#include <random>

namespace pdcert {

/// SplitMix64 finalizer; derives independent stream seeds from (seed, index).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index = 0)
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, std::uint64_t stream = 0)
{
    return Engine(mix_seed(seed, stream));
}

/// Uniform on [0, 1) from the top 53 bits; identical across standard libraries.
inline double uniform01(Engine& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform on (0, 1].
inline double uniform_open_closed(Engine& rng)
{
    return 1.0 - uniform01(rng);
}

inline double uniform(Engine& rng, double lo, double hi)
{
    return lo + (hi - lo) * uniform01(rng);
}

} // namespace pdcert
