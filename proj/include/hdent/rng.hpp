#pragma once

#include <cstdint>
#include <random>

namespace hdent {

// splitmix64 step; used to turn (base seed, index) pairs into well-spread
// stream seeds so partitioned work merges deterministically.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(base + index * 0x9E3779B97F4A7C15ull);
}

// Uniform in (0,1), never exactly 0 or 1 (safe under log()).
inline double uniform_open(std::mt19937_64& rng) {
  return (double(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace hdent
