#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace addhaz {

using Rng = std::mt19937_64;

/// Named random sub-streams derived from one master seed.
enum class Stream : std::uint64_t {
  kDataGen = 1,
  kTestGen = 2,
  kFolds = 3,
  kSplit = 4,
  kCalibration = 5,
  kPerturbation = 6,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for replicate `index` of sub-stream `stream`.
inline std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                                 std::uint64_t index = 0) {
  return splitmix64(splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(stream))) + index);
}

}  // namespace addhaz
