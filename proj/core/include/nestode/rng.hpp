// Copyright 2026 The Nestode Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NESTODE_RNG_HPP
#define NESTODE_RNG_HPP

#include <cmath>
#include <cstdint>

namespace nestode {

/// Fixed, platform-independent 64-bit PRNG (xoshiro256**), seeded through
/// splitmix64 so that any 64-bit value is a usable seed. Streams for
/// sub-generators are derived with split(), which keeps problem generation
/// reproducible bit-for-bit regardless of evaluation order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = SplitMix64(x);
  }

  std::uint64_t NextU64() {
    const std::uint64_t result = Rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = Rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  /// Standard normal via the Marsaglia polar method.
  double Gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, q;
    do {
      u = 2.0 * Uniform() - 1.0;
      v = 2.0 * Uniform() - 1.0;
      q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(q) / q);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

  double Gaussian(double mean, double stddev) {
    return mean + stddev * Gaussian();
  }

  /// Integer in [0, n).
  std::uint64_t Below(std::uint64_t n) { return NextU64() % n; }

  /// Derives an independent child stream; the parent state is untouched,
  /// so streams depend only on (seed, tag).
  static Rng Split(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t x = seed;
    const std::uint64_t a = SplitMix64(x);
    return Rng(a ^ (0x9e3779b97f4a7c15ULL * (tag + 1)));
  }

 private:
  static std::uint64_t SplitMix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t Rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace nestode

#endif  // NESTODE_RNG_HPP
