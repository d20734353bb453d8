// Copyright 2026 the sddjd authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace sddjd {

namespace detail {

// splitmix64 finalizer (Steele/Lea/Flood); also used as the mixing step of
// the substream derivation below.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  return mix64(state);
}

}  // namespace detail

/// Derives the seed of an independent substream from a master seed and a list
/// of integer keys. The rule is fixed and documented so that runs are
/// reproducible across platforms: the master seed is mixed through the
/// splitmix64 finalizer, then each key is folded in with one further
/// finalizer round. Synthetic problem generation uses keys (tag, index) with
/// one substream per drawn matrix; experiment sweeps use keys
/// (grid_index, trial_index) with one substream per cell.
inline std::uint64_t derive_stream(std::uint64_t seed,
                                   std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = detail::mix64(seed + 0x9E3779B97F4A7C15ull);
  for (std::uint64_t k : keys) {
    h = detail::mix64(h ^ (k + 0x9E3779B97F4A7C15ull));
  }
  return h;
}

/// xoshiro256++ (Blackman & Vigna, public domain), seeded through splitmix64.
/// The generator is fully specified here rather than delegated to
/// std::normal_distribution, whose output is implementation-defined; this
/// keeps synthetic datasets bit-reproducible for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = detail::splitmix64_next(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1), 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Unbiased uniform integer in [0, n), n >= 1. Rejection sampling, no
  /// modulo bias.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
  }

  /// One complex draw with independent standard normal real and imaginary
  /// parts (variance 1 each). A single Box-Muller pair feeds one entry, so
  /// the mapping from stream position to matrix entry is fixed.
  std::complex<double> next_complex_normal() {
    const std::uint64_t a = next_u64();
    const std::uint64_t b = next_u64();
    // u1 in (0, 1] so the log is finite; u2 in [0, 1).
    const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
  }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_;
};

}  // namespace sddjd
