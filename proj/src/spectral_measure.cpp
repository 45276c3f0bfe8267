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

#include "qcbm/spectral_measure.hpp"

#include <cmath>
#include <stdexcept>

#include "qcbm/errors.hpp"
#include "qcbm/prob_vector.hpp"

namespace qcbm {

Eigen::VectorXd enumerate_masses(const SpectralMeasure& g) {
  const int n = g.bit_width();
  if (n > kMaxDenseBits) throw SizeCapError("enumerate_masses: width exceeds dense cap");
  Eigen::VectorXd out(Eigen::Index{1} << n);
  for (Eigen::Index a = 0; a < out.size(); ++a)
    out[a] = g.mass(BitString(static_cast<std::uint64_t>(a), n));
  return out;
}

GaussianMeasure::GaussianMeasure(int n, double sigma) : n_(n), sigma_(sigma) {
  if (n < 1) throw std::invalid_argument("GaussianMeasure: width must be positive");
  if (!(sigma >= 0.0)) throw std::invalid_argument("GaussianMeasure: sigma must be >= 0");
  // expm1 keeps p strictly positive for very large bandwidths.
  p_ = sigma == 0.0 ? 0.5 : -0.5 * std::expm1(-1.0 / (2.0 * sigma * sigma));
}

double GaussianMeasure::mass(const BitString& alpha) const {
  if (alpha.width != n_) throw std::invalid_argument("GaussianMeasure::mass: width mismatch");
  const int w = hamming_weight(alpha);
  return std::pow(p_, w) * std::pow(1.0 - p_, n_ - w);
}

double GaussianMeasure::log_mass(const BitString& alpha) const {
  if (alpha.width != n_) throw std::invalid_argument("GaussianMeasure::log_mass: width mismatch");
  const int w = hamming_weight(alpha);
  return w * std::log(p_) + (n_ - w) * std::log1p(-p_);
}

BitString GaussianMeasure::sample(SplitMix64& rng) const {
  std::uint64_t bits = 0;
  for (int i = 0; i < n_; ++i) bits = (bits << 1) | (rng.next_bernoulli(p_) ? 1u : 0u);
  return BitString(bits, n_);
}

PointMassMeasure::PointMassMeasure(int n, BitString alpha_star, double eps)
    : n_(n), alpha_star_(alpha_star), eps_(eps) {
  if (n < 1 || n > 62) throw std::invalid_argument("PointMassMeasure: bad width");
  if (alpha_star.width != n) throw std::invalid_argument("PointMassMeasure: alpha* width mismatch");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("PointMassMeasure: eps must be in (0,1)");
}

double PointMassMeasure::mass(const BitString& alpha) const {
  if (alpha.width != n_) throw std::invalid_argument("PointMassMeasure::mass: width mismatch");
  if (alpha.bits == alpha_star_.bits) return 1.0 - eps_;
  return eps_ / static_cast<double>((std::uint64_t{1} << n_) - 1);
}

double PointMassMeasure::log_mass(const BitString& alpha) const { return std::log(mass(alpha)); }

BitString PointMassMeasure::sample(SplitMix64& rng) const {
  if (rng.next_bernoulli(1.0 - eps_)) return alpha_star_;
  const std::uint64_t others = (std::uint64_t{1} << n_) - 1;
  std::uint64_t v = rng.next_below(others);
  if (v >= alpha_star_.bits) ++v;  // skip alpha*, keeping the rest uniform
  return BitString(v, n_);
}

}  // namespace qcbm
