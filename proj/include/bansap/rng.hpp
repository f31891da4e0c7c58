#pragma once

#include <cstdint>
#include <random>

namespace bansap {

/// Engine used for all sequential sampling (directions, ball draws, ...).
using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Doubles as the seed mixer for stream derivation and
/// as a counter-based generator for per-(node, slot) noise, so a draw at slot
/// t never depends on the horizon or on evaluation order.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
  return splitmix64(seed ^ splitmix64(tag));
}

/// One stream per (seed, tag) pair; distinct tags never alias.
inline Rng derive_stream(std::uint64_t seed, std::uint64_t tag) {
  return Rng(mix_seed(seed, tag));
}

/// Uniform double in [0, 1) from a single 64-bit key.
constexpr double key_to_unit(std::uint64_t key) noexcept {
  return static_cast<double>(splitmix64(key) >> 11) * 0x1.0p-53;
}

namespace stream_tag {
inline constexpr std::uint64_t kInstance = 0x696e7374616e6365ULL;
inline constexpr std::uint64_t kActions = 0x61637469306e73ULL;
inline constexpr std::uint64_t kArrivalAmplitude = 0x616d706c69747564ULL;
inline constexpr std::uint64_t kArrivalNoise = 0x6e6f697365ULL;
}  // namespace stream_tag

}  // namespace bansap
