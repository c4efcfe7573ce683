#pragma once
// Counter-based noise for initial conditions: splitmix64 of (seed, index)
// gives platform-independent, order-independent draws.

#include <cstdint>

namespace chs {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Uniform draw in [-1, 1) for counter i under the given seed.
inline double uniform_pm1(uint64_t seed, uint64_t i) {
    const uint64_t h = splitmix64(seed ^ splitmix64(i + 1));
    return 2.0 * (double(h >> 11) / 9007199254740992.0) - 1.0;
}

}  // namespace chs
