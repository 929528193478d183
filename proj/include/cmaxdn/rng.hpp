#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace cmaxdn {

/// SplitMix64 generator. Hand-rolled so that seeded runs stay
/// byte-reproducible independent of the standard library implementation.
struct SplitMix64 {
  uint64_t state = 0;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  uint64_t below(uint64_t n) { return next() % n; }

  int8_t sign() { return (next() & 1u) ? int8_t(1) : int8_t(-1); }

  /// Exponential inter-arrival time for the given rate.
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  /// Poisson count via summed unit exponentials; exact for any lambda.
  uint64_t poisson(double lambda) {
    double acc = 0.0;
    uint64_t k = 0;
    while (true) {
      acc += exponential(1.0);
      if (acc > lambda) return k;
      ++k;
    }
  }
};

/// Derives an independent stream seed from a base seed and a stream index.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// First `take` entries of a seeded Fisher-Yates shuffle of 0..n-1.
inline std::vector<uint32_t> sample_without_replacement(std::size_t n,
                                                        std::size_t take,
                                                        SplitMix64& rng) {
  std::vector<uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  if (take > n) take = n;
  for (std::size_t i = 0; i < take; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(take);
  return idx;
}

}  // namespace cmaxdn
