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

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qcbm {

// A fixed-width word of bits b_1 ... b_n. The global index convention is
// b_1 = most significant bit, so the string "0110" of width 4 has value 6.
// Every module in this library shares this convention.
struct BitString {
  std::uint64_t bits = 0;
  int width = 0;

  BitString() = default;
  BitString(std::uint64_t bits_, int width_) : bits(bits_), width(width_) {
    if (width_ < 0 || width_ > 63) throw std::invalid_argument("BitString: width out of range");
    if (width_ < 63 && (bits_ >> width_) != 0)
      throw std::invalid_argument("BitString: value does not fit declared width");
  }

  // 1-based access from the left: bit(1) is b_1, the most significant bit.
  int bit(int i) const { return static_cast<int>((bits >> (width - i)) & 1u); }

  bool operator==(const BitString&) const = default;
};

inline int hamming_weight(const BitString& s) { return std::popcount(s.bits); }

// Parity of the AND of two masks, i.e. the GF(2) inner product a . b.
inline int parity_dot(const BitString& a, const BitString& b) {
  return std::popcount(a.bits & b.bits) & 1;
}

inline int parity_dot(std::uint64_t a, std::uint64_t b) { return std::popcount(a & b) & 1; }

inline std::string to_string(const BitString& s) {
  std::string out(static_cast<std::size_t>(s.width), '0');
  for (int i = 1; i <= s.width; ++i)
    if (s.bit(i)) out[static_cast<std::size_t>(i - 1)] = '1';
  return out;
}

inline BitString bitstring_from_string(const std::string& text) {
  if (text.empty() || text.size() > 63)
    throw std::invalid_argument("bitstring_from_string: bad length");
  std::uint64_t v = 0;
  for (char c : text) {
    if (c != '0' && c != '1') throw std::invalid_argument("bitstring_from_string: bad character");
    v = (v << 1) | static_cast<std::uint64_t>(c - '0');
  }
  return BitString(v, static_cast<int>(text.size()));
}

// All-zero and single-bit strings. Position j is 1-based from the left.
inline BitString zero_bits(int width) { return BitString(0, width); }
inline BitString unit_bit(int width, int j) {
  return BitString(std::uint64_t{1} << (width - j), width);
}

}  // namespace qcbm
