/*
 * Copyright 2026 The qcbm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>

#include "qcbm/bitstring.hpp"

namespace qcbm {

// SplitMix64 (Steele, Lea, Flood). Splittable, 64-bit state, bit-portable.
// All randomness in the library flows through explicitly seeded instances;
// there is no hidden global generator. Parallel work derives independent
// streams with derive_stream below instead of sharing state.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool next_bernoulli(double p) { return next_double() < p; }

  // Unbiased uniform integer in [0, bound).
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x > limit);
    return x % bound;
  }

  // Uniform bit word of the given width (top bits of the next output).
  std::uint64_t next_bits(int width) {
    if (width == 0) return 0;
    return next_u64() >> (64 - width);
  }

  BitString next_bitstring(int width) { return BitString(next_bits(width), width); }

 private:
  std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Derives the seed of an independent substream from (master, stream id).
inline std::uint64_t derive_stream(std::uint64_t master, std::uint64_t stream) {
  return detail::mix64(master + 0x9e3779b97f4a7c15ULL * (stream + 1));
}

inline std::uint64_t derive_stream(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return derive_stream(derive_stream(master, a), b);
}

}  // namespace qcbm
