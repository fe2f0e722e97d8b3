#pragma once

#include <cstdint>
#include <random>

namespace rowsim {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stateless keyed hash: same (seed, counter) always gives the same value.
constexpr std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t counter) {
  return splitmix64(seed ^ splitmix64(counter + 0x632be59bd9b4e019ULL));
}

/// Top 53 bits mapped onto [0, 1). Avoids std::uniform_real_distribution, whose output is
/// implementation-defined.
constexpr double to_unit(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

inline std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(counter_hash(seed, stream));
}

}  // namespace rowsim
