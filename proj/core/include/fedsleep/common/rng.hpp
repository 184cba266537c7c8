#pragma once

#include <cstdint>
#include <random>

namespace fedsleep {

using Rng = std::mt19937_64;

/// Independent random streams. Every consumer draws from its own stream so
/// that switching an attack or defense on does not perturb the randomness seen
/// by anything else (common random numbers across configurations).
enum class Stream : std::uint64_t {
  kLayout = 1,
  kTraffic = 2,
  kModelInit = 3,
  kClient = 4,
  kAttack = 5,
  kDefense = 6,
  kOracle = 7,
};

/// splitmix64 finalizer over (seed, stream, index).
std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  return Rng(derive_seed(seed, stream, index));
}

}  // namespace fedsleep
