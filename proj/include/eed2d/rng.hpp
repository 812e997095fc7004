#pragma once

#include <cstdint>
#include <random>

namespace eed2d {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of trial `trial` under `master`. Depends on nothing else, so trials reproduce
/// independently of scheduling and of which other trials run.
constexpr std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
  return splitmix64(splitmix64(master) ^ splitmix64(trial + 0x632be59bd9b4e019ULL));
}

enum class Stream : std::uint64_t { topology = 1, channels = 2, csi_error = 3 };

inline Rng make_rng(std::uint64_t seed, Stream stream) {
  return Rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream))));
}

}  // namespace eed2d
