#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>

#include "selguide/vec.hpp"

namespace selguide::rng {

/// Counter-based random draws. There is no generator state: every value is a
/// pure function of its key (seed, stream, slot, index), so consumers can be
/// added, removed, or reordered without shifting anyone else's draws. This is
/// what makes baseline and skip-window runs comparable draw-for-draw.
///
/// Slot conventions used across the engine (streams are use-specific):
///   slot 0 — sampler noise (stream = iteration index; stream = N is the init draw)
///   slot 1 — mixture sampling, component choice (stream = sample index)
///   slot 2 — mixture sampling, within-component normal (stream = sample index)
///   slot 3 — sliced-W2 projection directions (stream = projection index)
inline constexpr std::uint64_t kSlotStepNoise = 0;
inline constexpr std::uint64_t kSlotComponent = 1;
inline constexpr std::uint64_t kSlotGaussian = 2;
inline constexpr std::uint64_t kSlotProjection = 3;

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t key_hash(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t slot, std::uint64_t index) noexcept {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ stream);
    h = mix64(h ^ slot);
    h = mix64(h ^ index);
    return h;
}

/// Uniform in the open interval (0,1); never returns 0 or 1.
inline double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t slot,
                        std::uint64_t index) noexcept {
    const std::uint64_t bits = key_hash(seed, stream, slot, index) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

/// Standard normal via Box-Muller. Each index consumes its own pair of
/// uniforms, so normals at distinct indices are independent.
inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t slot,
                     std::uint64_t index) noexcept {
    const double u1 = uniform01(seed, stream, slot, 2 * index);
    const double u2 = uniform01(seed, stream, slot, 2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline Vec normal_vec(std::uint64_t seed, std::uint64_t stream, std::uint64_t slot,
                      std::size_t dim) {
    Vec out(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        out[j] = normal(seed, stream, slot, j);
    }
    return out;
}

}  // namespace selguide::rng
