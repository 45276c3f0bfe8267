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

#include "qcbm/iqp_circuit.hpp"

namespace qcbm {

struct ZEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

// Monte-Carlo estimate of <Z_alpha> for a generator-mode circuit.
//
// Draws samples_y hidden and samples_z visible bitstrings uniformly at
// random and averages the phase-difference cosine over the full
// samples_y x samples_z cross product. The estimator is unbiased for the
// exact expectation. When samples_y >= 2^m the hidden side is enumerated
// exhaustively instead of sampled (the uniform average over y is then
// exact, which only removes variance). Deterministic given seed.
ZEstimate mc_z_expectation(const IqpCircuit& c, const BitString& alpha, std::int64_t samples_y,
                           std::int64_t samples_z, std::uint64_t seed);

// Unbiased estimate of d<Z_alpha>/d theta_j for every gate j, averaged over
// the same sample set mc_z_expectation uses for this seed.
Eigen::VectorXd mc_z_gradient(const IqpCircuit& c, const BitString& alpha, std::int64_t samples_y,
                              std::int64_t samples_z, std::uint64_t seed);

// The estimator's expectation, computed by enumerating every (y, z) pair.
// Equals exact_z_expectation up to float rounding; kept as an independent
// algebraic route for cross-checking.
double mc_z_expectation_exhaustive(const IqpCircuit& c, const BitString& alpha);
Eigen::VectorXd mc_z_gradient_exhaustive(const IqpCircuit& c, const BitString& alpha);

// Value and gradient from one pass over one sample set; the building block
// for the MMD estimators.
struct ZEval {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
  Eigen::VectorXd grad;
};
ZEval mc_z_eval(const IqpCircuit& c, const BitString& alpha, std::int64_t samples_y,
                std::int64_t samples_z, std::uint64_t seed, bool want_gradient);

// Hot-path variant: returns the value and adds grad_scale times the per-gate
// gradient into grad_acc in place, touching only the gates alpha activates.
double mc_z_eval_accumulate(const IqpCircuit& c, const BitString& alpha, std::int64_t samples_y,
                            std::int64_t samples_z, std::uint64_t seed, double grad_scale,
                            Eigen::VectorXd& grad_acc);

// Shot-budget split used when a single shot count S is given: the hidden
// side gets min(2^m, ceil(sqrt(S))) samples (exhaustive when 2^m is the
// minimum), the visible side the rest.
struct YzSplit {
  std::int64_t samples_y = 1;
  std::int64_t samples_z = 1;
};
YzSplit default_yz_split(std::int64_t shots, int m_hidden);

}  // namespace qcbm
