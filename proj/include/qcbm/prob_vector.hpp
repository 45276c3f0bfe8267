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

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "qcbm/bitstring.hpp"

namespace qcbm {

// Dense representations over {0,1}^n are capped so that 2^n doubles stay
// within desk memory.
inline constexpr int kMaxDenseBits = 24;

// A probability distribution over {0,1}^n stored densely, indexed by the
// integer value of the bitstring (leftmost bit most significant).
//
// The constructor accepts mass vectors whose sum deviates from 1 by at most
// 1e-9 and renormalizes; larger deviations are rejected. Entries in
// [-1e-12, 0) are treated as accumulated float dust and clamped to zero.
class ProbVector {
 public:
  ProbVector(int n, Eigen::VectorXd mass);

  static ProbVector uniform(int n);
  static ProbVector delta(int n, std::uint64_t x);

  int bit_width() const { return n_; }
  Eigen::Index size() const { return mass_.size(); }
  const Eigen::VectorXd& mass() const { return mass_; }
  double operator[](std::uint64_t x) const { return mass_[static_cast<Eigen::Index>(x)]; }

 private:
  int n_;
  Eigen::VectorXd mass_;
};

// Walsh characteristic function phi[alpha] = sum_x p(x) (-1)^{alpha . x}.
struct CharSpectrum {
  int n = 0;
  Eigen::VectorXd phi;
};

// Total variation distance, 1/2 * sum_x |p(x) - q(x)|, in [0, 1].
double tvd(const ProbVector& p, const ProbVector& q);

CharSpectrum walsh_char(const ProbVector& p);

// Inverse transform; walsh_char followed by inverse_walsh is the identity.
ProbVector inverse_walsh(const CharSpectrum& s);

// Text serialization: "#dist n=<n>" header then one mass per line.
void write_prob_vector(const std::string& path, const ProbVector& p);
ProbVector read_prob_vector(const std::string& path);

}  // namespace qcbm
