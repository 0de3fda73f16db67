// SPDX-License-Identifier: Apache-2.0
//
// Seeded random streams. Every stochastic operation takes an explicit
// generator; per-trial streams are derived from (master seed, index).

#pragma once

#include <cstdint>
#include <random>

namespace olab {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to decorrelate derived seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix64(mix64(master) ^ mix64(stream + 0x5851f42d4c957f2dULL));
}

inline Rng make_stream(std::uint64_t master, std::uint64_t stream) {
  return Rng(derive_seed(master, stream));
}

// Uniform double in [0,1) with 53 random bits. Spelled out because the
// standard distributions are not bit-stable across library vendors.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Unbiased integer in [0, n) by rejection.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = (~std::uint64_t{0} / n) * n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace olab
