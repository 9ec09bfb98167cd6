#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace hsiu::rng {

// Counter-based generator: every draw is a pure function of (seed, stream, counter),
// so generating elements in any order or in parallel gives the same values.
//
// Mixing is SplitMix64's finalizer applied to a combination of the three keys.
// Uniforms take the top 53 bits; Gaussians use Box-Muller (cosine branch) on the
// uniform pair at counters (2i, 2i+1).

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash(std::uint64_t seed, std::uint64_t stream,
                             std::uint64_t counter) noexcept {
    return mix64(mix64(mix64(seed) ^ (stream * 0xd6e8feb86659fd93ULL)) ^ counter);
}

/// Uniform in [0, 1).
constexpr double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept {
    return static_cast<double>(hash(seed, stream, counter) >> 11) * 0x1.0p-53;
}

/// Standard normal draw number `index` of the stream.
inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept {
    const double u1 = 1.0 - uniform(seed, stream, 2 * index);  // (0, 1]
    const double u2 = uniform(seed, stream, 2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// FNV-1a, used to derive per-tensor streams from weight names.
constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Stream ids reserved by the library.
inline constexpr std::uint64_t kGaussianStream = 1;
inline constexpr std::uint64_t kImpulseStream = 2;
inline constexpr std::uint64_t kStripeStream = 3;

}  // namespace hsiu::rng
