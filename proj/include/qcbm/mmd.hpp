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
#include <optional>

#include "qcbm/dataset.hpp"
#include "qcbm/fvsbn.hpp"
#include "qcbm/iqp_circuit.hpp"
#include "qcbm/prob_vector.hpp"
#include "qcbm/spectral_measure.hpp"

namespace qcbm {

// Exact enumeration is feasible through n = 20 in seconds.
inline constexpr int kMaxMmdEnumBits = 20;

// Squared spectral MMD: sum_alpha G(alpha) (phi_p(alpha) - phi_q(alpha))^2.
// Nonnegative; zero iff p = q when G has full support.
double mmd_exact(const ProbVector& p, const ProbVector& q, const SpectralMeasure& g);

// Exact gradient of mmd_exact(p, q_theta, G) with respect to the gate
// angles, by enumeration. Intended for small n.
Eigen::VectorXd mmd_exact_grad_theta(const ProbVector& p, const IqpCircuit& c,
                                     const SpectralMeasure& g);

// Exact gradient of sum_alpha G_gamma(alpha) (phi_p - phi_q)^2 with respect
// to the critic parameters, by enumeration.
FvsbnGrad mmd_exact_grad_gamma(const ProbVector& p, const ProbVector& q, const Fvsbn& f);

// The data side of the estimators: the exact characteristic value of either
// a dataset (all rows, no resampling) or a known distribution. Widths up to
// 16 bits precompute the full spectrum once.
class DataTerm {
 public:
  explicit DataTerm(const Dataset& d);
  explicit DataTerm(const ProbVector& p);
  int bit_width() const { return n_; }
  double value(const BitString& alpha) const;

 private:
  int n_;
  std::optional<CharSpectrum> table_;
  std::optional<Dataset> rows_;
};

struct MmdEstimate {
  double value = 0.0;      // may be slightly negative on the MC path
  double std_error = 0.0;  // spread of the per-frequency products / sqrt(K)
  std::int64_t freq_batch = 0;
  std::int64_t shots = 0;
  std::uint64_t seed = 0;
};

// Unbiased Monte-Carlo estimate of the squared MMD: K frequencies are drawn
// from G; each frequency's circuit expectation is estimated twice from
// independent halves of the S shots, and the two differences are multiplied
// so the square carries no variance bias. Deterministic given seed; the
// per-frequency work parallelizes over `threads` without changing results.
MmdEstimate mmd_estimate(const DataTerm& data, const IqpCircuit& c, const SpectralMeasure& g,
                         std::int64_t freq_batch, std::int64_t shots, std::uint64_t seed,
                         int threads = 1);
MmdEstimate mmd_estimate(const Dataset& data, const IqpCircuit& c, const SpectralMeasure& g,
                         std::int64_t freq_batch, std::int64_t shots, std::uint64_t seed,
                         int threads = 1);

// Unbiased gradient of the squared MMD with respect to the gate angles: the
// difference factor from one shot half multiplies the gradient estimate from
// the other half.
Eigen::VectorXd mmd_grad_theta(const DataTerm& data, const IqpCircuit& c, const SpectralMeasure& g,
                               std::int64_t freq_batch, std::int64_t shots, std::uint64_t seed,
                               int threads = 1);
Eigen::VectorXd mmd_grad_theta(const Dataset& data, const IqpCircuit& c, const SpectralMeasure& g,
                               std::int64_t freq_batch, std::int64_t shots, std::uint64_t seed,
                               int threads = 1);

// Score-function gradient with respect to the critic parameters, packed in
// the critic's flat layout. This is the ascent direction of the critic's
// maximization.
Eigen::VectorXd mmd_grad_gamma(const DataTerm& data, const IqpCircuit& c, const Fvsbn& f,
                               std::int64_t freq_batch, std::int64_t shots, std::uint64_t seed,
                               int threads = 1);
Eigen::VectorXd mmd_grad_gamma(const Dataset& data, const IqpCircuit& c, const Fvsbn& f,
                               std::int64_t freq_batch, std::int64_t shots, std::uint64_t seed,
                               int threads = 1);

// One pass producing the estimate and both gradients from a shared frequency
// batch; the training loop's workhorse.
struct MmdBatch {
  MmdEstimate estimate;
  Eigen::VectorXd grad_theta;
  Eigen::VectorXd grad_gamma;  // empty when no critic is supplied
};
MmdBatch mmd_batch(const DataTerm& data, const IqpCircuit& c, const SpectralMeasure& g,
                   const Fvsbn* critic, std::int64_t freq_batch, std::int64_t shots,
                   std::uint64_t seed, int threads, bool want_theta_grad);

}  // namespace qcbm
