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

#include "qcbm/mmd.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qcbm/errors.hpp"
#include "qcbm/iqp_estimator.hpp"
#include "qcbm/iqp_exact.hpp"
#include "qcbm/parallel.hpp"
#include "qcbm/rng.hpp"

namespace qcbm {

namespace {

constexpr int kDataTableMaxBits = 16;
constexpr std::int64_t kFreqBlock = 32;

void check_enum_width(int n, const char* who) {
  if (n > kMaxMmdEnumBits) throw SizeCapError(std::string(who) + ": enumeration cap is n <= 20");
}

}  // namespace

double mmd_exact(const ProbVector& p, const ProbVector& q, const SpectralMeasure& g) {
  if (p.bit_width() != q.bit_width() || p.bit_width() != g.bit_width())
    throw std::invalid_argument("mmd_exact: width mismatch");
  check_enum_width(p.bit_width(), "mmd_exact");
  const CharSpectrum sp = walsh_char(p);
  const CharSpectrum sq = walsh_char(q);
  double acc = 0.0;
  for (Eigen::Index a = 0; a < sp.phi.size(); ++a) {
    const double diff = sp.phi[a] - sq.phi[a];
    acc += g.mass(BitString(static_cast<std::uint64_t>(a), p.bit_width())) * diff * diff;
  }
  return acc;
}

Eigen::VectorXd mmd_exact_grad_theta(const ProbVector& p, const IqpCircuit& c,
                                     const SpectralMeasure& g) {
  if (p.bit_width() != c.n_visible() || p.bit_width() != g.bit_width())
    throw std::invalid_argument("mmd_exact_grad_theta: width mismatch");
  check_enum_width(p.bit_width(), "mmd_exact_grad_theta");
  const CharSpectrum sp = walsh_char(p);
  const CharSpectrum sq = walsh_char(exact_visible_distribution(c));
  const Eigen::MatrixXd dchar = exact_char_gradient(c);
  Eigen::VectorXd weights(sp.phi.size());
  for (Eigen::Index a = 0; a < weights.size(); ++a)
    weights[a] = g.mass(BitString(static_cast<std::uint64_t>(a), p.bit_width())) *
                 (sp.phi[a] - sq.phi[a]);
  return -2.0 * (dchar.transpose() * weights);
}

FvsbnGrad mmd_exact_grad_gamma(const ProbVector& p, const ProbVector& q, const Fvsbn& f) {
  if (p.bit_width() != q.bit_width() || p.bit_width() != f.bit_width())
    throw std::invalid_argument("mmd_exact_grad_gamma: width mismatch");
  check_enum_width(p.bit_width(), "mmd_exact_grad_gamma");
  const CharSpectrum sp = walsh_char(p);
  const CharSpectrum sq = walsh_char(q);
  const int n = p.bit_width();
  FvsbnGrad acc{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n)};
  for (Eigen::Index a = 0; a < sp.phi.size(); ++a) {
    const BitString alpha(static_cast<std::uint64_t>(a), n);
    const double diff = sp.phi[a] - sq.phi[a];
    if (diff == 0.0) continue;
    const double w = f.mass(alpha) * diff * diff;
    const FvsbnGrad gl = f.grad_log_mass(alpha);
    acc.dW += w * gl.dW;
    acc.db += w * gl.db;
  }
  return acc;
}

DataTerm::DataTerm(const Dataset& d) : n_(d.n) {
  if (d.rows.empty()) throw std::invalid_argument("DataTerm: empty dataset");
  if (d.n <= kDataTableMaxBits) {
    table_ = walsh_char(empirical_dist(d));
  } else {
    rows_ = d;
  }
}

DataTerm::DataTerm(const ProbVector& p) : n_(p.bit_width()), table_(walsh_char(p)) {}

double DataTerm::value(const BitString& alpha) const {
  if (alpha.width != n_) throw std::invalid_argument("DataTerm::value: width mismatch");
  if (table_) return table_->phi[static_cast<Eigen::Index>(alpha.bits)];
  return data_z_expectation(*rows_, alpha);
}

MmdBatch mmd_batch(const DataTerm& data, const IqpCircuit& c, const SpectralMeasure& g,
                   const Fvsbn* critic, std::int64_t freq_batch, std::int64_t shots,
                   std::uint64_t seed, int threads, bool want_theta_grad) {
  if (!c.is_generator_mode())
    throw std::invalid_argument("mmd estimator: requires a generator-mode circuit");
  if (freq_batch < 2 || shots < 2)
    throw std::invalid_argument("mmd estimator: need at least 2 frequencies and 2 shots");
  if (data.bit_width() != c.n_visible() || g.bit_width() != c.n_visible())
    throw std::invalid_argument("mmd estimator: width mismatch");

  const std::int64_t shots_a = shots / 2;
  const std::int64_t shots_b = shots - shots_a;
  const YzSplit split_a = default_yz_split(shots_a, c.m_hidden());
  const YzSplit split_b = default_yz_split(shots_b, c.m_hidden());
  const Eigen::Index gate_count = static_cast<Eigen::Index>(c.gates().size());
  const Eigen::Index gamma_count = critic ? critic->parameter_count() : 0;

  const std::int64_t blocks = (freq_batch + kFreqBlock - 1) / kFreqBlock;
  std::vector<double> block_value(static_cast<std::size_t>(blocks), 0.0);
  std::vector<double> block_value_sq(static_cast<std::size_t>(blocks), 0.0);
  std::vector<Eigen::VectorXd> block_theta, block_gamma;
  if (want_theta_grad)
    block_theta.assign(static_cast<std::size_t>(blocks), Eigen::VectorXd::Zero(gate_count));
  if (critic)
    block_gamma.assign(static_cast<std::size_t>(blocks), Eigen::VectorXd::Zero(gamma_count));

  parallel_for_blocks(freq_batch, kFreqBlock, threads, [&](std::int64_t b, std::int64_t k0,
                                                           std::int64_t k1) {
    for (std::int64_t k = k0; k < k1; ++k) {
      const std::uint64_t base = derive_stream(seed, static_cast<std::uint64_t>(k));
      SplitMix64 alpha_rng(derive_stream(base, 0));
      const BitString alpha = g.sample(alpha_rng);
      const double d = data.value(alpha);
      const double value_a = mc_z_eval(c, alpha, split_a.samples_y, split_a.samples_z,
                                       derive_stream(base, 1), false)
                                 .value;
      // The difference factor from half A scales half B's gradient, keeping
      // the product of the two independent halves unbiased.
      double value_b;
      if (want_theta_grad) {
        value_b = mc_z_eval_accumulate(c, alpha, split_b.samples_y, split_b.samples_z,
                                       derive_stream(base, 2), -2.0 * (d - value_a),
                                       block_theta[static_cast<std::size_t>(b)]);
      } else {
        value_b = mc_z_eval(c, alpha, split_b.samples_y, split_b.samples_z,
                            derive_stream(base, 2), false)
                      .value;
      }
      const double product = (d - value_a) * (d - value_b);
      block_value[static_cast<std::size_t>(b)] += product;
      block_value_sq[static_cast<std::size_t>(b)] += product * product;
      if (critic)
        critic->accumulate_grad_log_mass(alpha, product, block_gamma[static_cast<std::size_t>(b)]);
    }
  });

  MmdBatch out;
  double sum = 0.0, sum_sq = 0.0;
  Eigen::VectorXd theta_sum = Eigen::VectorXd::Zero(want_theta_grad ? gate_count : 0);
  Eigen::VectorXd gamma_sum = Eigen::VectorXd::Zero(gamma_count);
  for (std::int64_t b = 0; b < blocks; ++b) {
    sum += block_value[static_cast<std::size_t>(b)];
    sum_sq += block_value_sq[static_cast<std::size_t>(b)];
    if (want_theta_grad) theta_sum += block_theta[static_cast<std::size_t>(b)];
    if (critic) gamma_sum += block_gamma[static_cast<std::size_t>(b)];
  }
  const double count = static_cast<double>(freq_batch);
  out.estimate.value = sum / count;
  const double var = (sum_sq - count * out.estimate.value * out.estimate.value) / (count - 1.0);
  out.estimate.std_error = std::sqrt(std::max(var, 0.0) / count);
  out.estimate.freq_batch = freq_batch;
  out.estimate.shots = shots;
  out.estimate.seed = seed;
  if (want_theta_grad) out.grad_theta = theta_sum / count;
  if (critic) out.grad_gamma = gamma_sum / count;
  return out;
}

MmdEstimate mmd_estimate(const DataTerm& data, const IqpCircuit& c, const SpectralMeasure& g,
                         std::int64_t freq_batch, std::int64_t shots, std::uint64_t seed,
                         int threads) {
  return mmd_batch(data, c, g, nullptr, freq_batch, shots, seed, threads, false).estimate;
}

MmdEstimate mmd_estimate(const Dataset& data, const IqpCircuit& c, const SpectralMeasure& g,
                         std::int64_t freq_batch, std::int64_t shots, std::uint64_t seed,
                         int threads) {
  return mmd_estimate(DataTerm(data), c, g, freq_batch, shots, seed, threads);
}

Eigen::VectorXd mmd_grad_theta(const DataTerm& data, const IqpCircuit& c, const SpectralMeasure& g,
                               std::int64_t freq_batch, std::int64_t shots, std::uint64_t seed,
                               int threads) {
  return mmd_batch(data, c, g, nullptr, freq_batch, shots, seed, threads, true).grad_theta;
}

Eigen::VectorXd mmd_grad_theta(const Dataset& data, const IqpCircuit& c, const SpectralMeasure& g,
                               std::int64_t freq_batch, std::int64_t shots, std::uint64_t seed,
                               int threads) {
  return mmd_grad_theta(DataTerm(data), c, g, freq_batch, shots, seed, threads);
}

Eigen::VectorXd mmd_grad_gamma(const DataTerm& data, const IqpCircuit& c, const Fvsbn& f,
                               std::int64_t freq_batch, std::int64_t shots, std::uint64_t seed,
                               int threads) {
  return mmd_batch(data, c, f, &f, freq_batch, shots, seed, threads, false).grad_gamma;
}

Eigen::VectorXd mmd_grad_gamma(const Dataset& data, const IqpCircuit& c, const Fvsbn& f,
                               std::int64_t freq_batch, std::int64_t shots, std::uint64_t seed,
                               int threads) {
  return mmd_grad_gamma(DataTerm(data), c, f, freq_batch, shots, seed, threads);
}

}  // namespace qcbm
