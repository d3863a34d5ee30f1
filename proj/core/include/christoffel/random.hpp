#pragma once

#include <cstdint>
#include <random>

namespace christoffel {

/// splitmix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Engine for one (seed, stream, index) triple. Each sample gets its own
/// engine so draws do not depend on batching or thread count.
inline std::mt19937_64 counter_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return std::mt19937_64(mix64(mix64(mix64(seed) ^ stream) ^ index));
}

/// Uniform double in [0, 1) from the top 53 bits. Unlike
/// std::uniform_real_distribution this is identical on every standard library.
inline double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, bound) by rejection; portable across libraries.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t bound) {
    const std::uint64_t limit = bound == 0 ? 0 : (~std::uint64_t{0} - bound + 1) % bound;  // 2^64 mod bound
    for (;;) {
        const std::uint64_t r = gen();
        if (r >= limit) return r % bound;
    }
}

}  // namespace christoffel
