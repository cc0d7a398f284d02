#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace qaev {

// All randomness flows through mt19937_64 plus the bounded draw below, so a
// (seed, algorithm) pair reproduces byte-identically on any conforming
// standard library. std::uniform_int_distribution is implementation-defined
// and deliberately avoided.
using Rng = std::mt19937_64;

// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Stable per-instance seed: instance k of a run is reproducible in isolation.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label, int n_bits,
                                 std::uint64_t index) {
    std::uint64_t h = mix64(master_seed);
    h = mix64(h ^ fnv1a(label));
    h = mix64(h ^ static_cast<std::uint64_t>(n_bits));
    h = mix64(h ^ index);
    return h;
}

// Uniform draw from [0, bound) by masked rejection.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    std::uint64_t mask = bound - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    for (;;) {
        const std::uint64_t v = rng() & mask;
        if (v < bound) return v;
    }
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Fisher-Yates permutation of {0, ..., size-1}.
template <typename IndexType>
std::vector<IndexType> random_permutation(IndexType size, Rng& rng) {
    std::vector<IndexType> perm(static_cast<std::size_t>(size));
    for (IndexType i = 0; i < size; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (IndexType i = size - 1; i > 0; --i) {
        const auto j = static_cast<IndexType>(uniform_below(rng, static_cast<std::uint64_t>(i) + 1));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    return perm;
}

}  // namespace qaev
