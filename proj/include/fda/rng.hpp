#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "fda/types.hpp"

namespace fda {

// Deterministic seed derivation. A master seed is split into independent
// substreams by absorbing a path of 64-bit tags through splitmix64:
//   stream = derive_seed(master, {tag})
//   per-iteration = derive_seed(master, {tag, q})
//   per-trial = derive_seed(master, {tag, q, j})
// Stream tags used by the design pipeline:
//   0x5741 weight rounding, 0x5346 waveform rounding, 0x4d43 Monte-Carlo.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(master);
  for (std::uint64_t p : path) s = splitmix64(s ^ p);
  return s;
}

inline constexpr std::uint64_t kStreamWeightRounding = 0x5741;
inline constexpr std::uint64_t kStreamWaveformRounding = 0x5346;
inline constexpr std::uint64_t kStreamMonteCarlo = 0x4d43;

/// Standard complex Gaussian vector, CN(0, I): re and im ~ N(0, 1/2).
inline CVec complex_gaussian(int n, std::mt19937_64& gen) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  CVec v(n);
  for (int i = 0; i < n; ++i) {
    double re = nd(gen);
    double im = nd(gen);
    v(i) = cxd(re, im);
  }
  return v;
}

inline double uniform_phase(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> ud(0.0, 2.0 * kPi);
  return ud(gen);
}

}  // namespace fda
