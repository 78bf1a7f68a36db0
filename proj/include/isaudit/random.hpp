/*
 * Copyright 2026 The isaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ISAUDIT_RANDOM_HPP_
#define ISAUDIT_RANDOM_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

#include "isaudit/error.hpp"

namespace isaudit {

// SplitMix64 finalizer (Steele, Lea & Flood). Used to derive independent
// stream seeds from a user seed.
constexpr std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed for sub-stream `stream` of `seed`: SplitMix64(seed XOR stream).
constexpr std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream) {
  return SplitMix64(seed ^ stream);
}

// Seeded generator with a fully specified output sequence. The engine is
// mt19937_64, whose sequence the standard fixes; the mappings to doubles,
// bounded integers and categories are done here instead of through the
// implementation-defined <random> distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n) by rejection.
  std::size_t below(std::size_t n) {
    if (n == 0) throw Error(ErrorKind::kInvalidArgument, "below(0)");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return static_cast<std::size_t>(x % bound);
  }

  // Index drawn from `probs` (assumed to sum to one) by inverting the CDF.
  // Rounding slack at the top falls on the last positive entry.
  std::size_t categorical(std::span<const double> probs) {
    const double u = uniform();
    double cdf = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] <= 0.0) continue;
      last_positive = i;
      cdf += probs[i];
      if (u < cdf) return i;
    }
    return last_positive;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace isaudit

#endif  // ISAUDIT_RANDOM_HPP_
