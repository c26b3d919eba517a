#pragma once

#include <cstdint>
#include <random>

namespace wnls {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Per-member seed: hashed master seed xor member index, so members can be generated
/// in any order (or on any thread) and replayed individually. Hashing keeps the member
/// seeds of neighbouring masters (1, 2, 3, ...) disjoint.
inline std::uint64_t member_seed(std::uint64_t master, std::uint64_t index) { return splitmix64(master) ^ index; }

/// Independent streams for the different consumers of one member seed.
enum class Stream : std::uint64_t {
  gaussian = 1,
  hmc = 2,
  resample = 3,
  experiment = 4,
};

inline std::mt19937_64 make_engine(std::uint64_t seed, Stream stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream))));
}

}  // namespace wnls
