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
#include <string>

#include "qcbm/spectral_measure.hpp"

namespace qcbm {

// Gradient of log mass with respect to the FVSBN parameters. dW is zero on
// and above the diagonal, matching the autoregressive structure.
struct FvsbnGrad {
  Eigen::MatrixXd dW;
  Eigen::VectorXd db;
};

// Fully visible sigmoid belief network over n bits, used as the trainable
// spectral measure (the critic). Bit i's conditional is
//   p_i = eps + (1 - 2 eps) * sigmoid(b_i + sum_{r<i} W_ir (2 a_r - 1)),
// with bits ordered most significant first. W is strictly lower triangular;
// the constructor rejects any mass on or above the diagonal rather than
// silently zeroing it. The eps clamp keeps every conditional inside
// [eps, 1-eps], so the measure always has full support.
class Fvsbn : public SpectralMeasure {
 public:
  Fvsbn(int n, Eigen::MatrixXd w, Eigen::VectorXd b, double eps = 1e-6);

  int bit_width() const override { return n_; }
  const Eigen::MatrixXd& w() const { return w_; }
  const Eigen::VectorXd& b() const { return b_; }
  double eps() const { return eps_; }

  double mass(const BitString& alpha) const override;
  double log_mass(const BitString& alpha) const override;
  BitString sample(SplitMix64& rng) const override;  // ancestral, bit 1 to n

  FvsbnGrad grad_log_mass(const BitString& alpha) const;

  // Adds scale * grad_log_mass(alpha) into a flat accumulator laid out like
  // pack_parameters(); allocation-free for the sampling hot path.
  void accumulate_grad_log_mass(const BitString& alpha, double scale,
                                Eigen::VectorXd& packed_acc) const;

  // Flat parameter view: b first, then the strictly-lower W entries row by
  // row. Used by the optimizer.
  Eigen::Index parameter_count() const;
  Eigen::VectorXd pack_parameters() const;
  void unpack_parameters(const Eigen::VectorXd& packed);
  static Eigen::VectorXd pack_gradient(const FvsbnGrad& g);

 private:
  int n_;
  Eigen::MatrixXd w_;
  Eigen::VectorXd b_;
  double eps_;
};

// W = 0 and biases chosen so the measure equals GaussianMeasure(n, sigma);
// sigma = 0 gives b = 0 exactly.
Fvsbn fvsbn_init_gaussian(int n, double sigma, double eps = 1e-6);

// The sparse 12-bit warm start whose mass concentrates on the three parity
// frequencies of the built-in 12-bit check matrix as K grows. Other widths
// are rejected.
Fvsbn fvsbn_init_warm(int n, double strength = 10.0, double eps = 1e-6);

// Checkpoint text: width and eps, then b entries, then nonzero W entries as
// "(i, r, value)" triples with 0-based indices; 17 significant digits.
void write_fvsbn(const std::string& path, const Fvsbn& f);
Fvsbn read_fvsbn(const std::string& path);

}  // namespace qcbm
