#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace ranndy {

// All randomness in the library flows through one documented scheme so that
// results can be reproduced bit for bit by other implementations:
//   - generator: std::mt19937_64 (output sequence fixed by the C++ standard)
//   - uniform double in [0,1): (u64 >> 11) * 2^-53
//   - standard normal: Box-Muller, exactly two generator outputs per draw,
//     z = sqrt(-2 ln u1) * cos(2 pi u2) with u1 in (0,1], u2 in [0,1)
// Independent streams (trajectories, k-means restarts) are seeded through
// splitmix64 so they never share state regardless of evaluation order.

inline double uniform01(std::mt19937_64& gen)
{
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double normal01(std::mt19937_64& gen)
{
    const double u1 = static_cast<double>((gen() >> 11) + 1) * 0x1.0p-53; // (0,1]
    const double u2 = static_cast<double>(gen() >> 11) * 0x1.0p-53;      // [0,1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream)
{
    return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

} // namespace ranndy
