#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>
#include <vector>

#include "schemashift/ident.hpp"

namespace schemashift {

// FNV-1a over the lowercase form, stable across platforms and runs.
inline std::uint64_t stable_hash(std::string_view s, std::uint64_t h = 1469598103934665603ull) {
    for (unsigned char c : s) {
        h ^= static_cast<unsigned char>(std::tolower(c));
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    v += 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    v ^= v >> 31;
    v *= 0xbf58476d1ce4e5b9ull;
    v ^= v >> 27;
    return h ^ v;
}

// Independent stream keyed by a seed and any number of labels.
template <typename... Labels>
std::mt19937_64 make_stream(std::uint64_t seed, const Labels&... labels) {
    std::uint64_t h = mix(0x5eed, seed);
    ((h = mix(h, stable_hash(std::string_view(labels)))), ...);
    return std::mt19937_64(h);
}

// Uniform integer in [lo, hi]; avoids distribution objects so sequences are
// identical across standard library implementations.
inline std::int64_t uniform(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    if (hi <= lo) return lo;
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(rng());
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t x;
    do x = rng();
    while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
}

inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(i) - 1))]);
}

}  // namespace schemashift
