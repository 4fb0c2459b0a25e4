#pragma once

#include <cstdint>
#include <random>

namespace rdecusum {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer (Steele, Lea & Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for stream `stream` of work item `index` under `base_seed`.
///
/// The derivation is a chain of SplitMix64 mixes, so every (base, index,
/// stream) triple maps to an unrelated 64-bit seed and no item depends on the
/// order in which items are executed. Stream 0 carries observations; stream 1
/// carries the fractional-sampling coin; higher streams are free for callers.
constexpr std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index,
                                    std::uint64_t stream = 0) noexcept {
  return splitmix64(splitmix64(splitmix64(base_seed) ^ index) + stream);
}

inline Engine make_engine(std::uint64_t base_seed, std::uint64_t index,
                          std::uint64_t stream = 0) {
  return Engine{derive_seed(base_seed, index, stream)};
}

namespace streams {
inline constexpr std::uint64_t kObservations = 0;
inline constexpr std::uint64_t kCoin = 1;
inline constexpr std::uint64_t kNoise = 2;
}  // namespace streams

}  // namespace rdecusum
