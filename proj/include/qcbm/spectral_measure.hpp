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

#include "qcbm/bitstring.hpp"
#include "qcbm/rng.hpp"

namespace qcbm {

// A probability mass over frequencies alpha in {0,1}^n: the Fourier side of
// a stationary kernel on the Boolean cube. Full support makes the kernel
// characteristic. Measures are immutable values; mass/log_mass are pure and
// sampling takes the caller's generator, so there is no hidden RNG state.
class SpectralMeasure {
 public:
  virtual ~SpectralMeasure() = default;
  virtual int bit_width() const = 0;
  virtual double mass(const BitString& alpha) const = 0;
  virtual double log_mass(const BitString& alpha) const = 0;
  virtual BitString sample(SplitMix64& rng) const = 0;
};

// Enumerates mass over all 2^n frequencies; for checks at small n.
Eigen::VectorXd enumerate_masses(const SpectralMeasure& g);

// Product measure: each frequency bit is set independently with probability
// p_sigma = (1 - exp(-1/(2 sigma^2))) / 2; sigma = 0 means the uniform
// measure (p = 1/2). This is the Fourier transform of the product kernel
// exp(-sum_i |b_i - b_i'| / (2 sigma^2)) on bitstrings.
class GaussianMeasure : public SpectralMeasure {
 public:
  GaussianMeasure(int n, double sigma);

  int bit_width() const override { return n_; }
  double bit_probability() const { return p_; }
  double sigma() const { return sigma_; }

  double mass(const BitString& alpha) const override;
  double log_mass(const BitString& alpha) const override;
  BitString sample(SplitMix64& rng) const override;

 private:
  int n_;
  double sigma_;
  double p_;
};

// Mass 1 - eps on a designated frequency, the remaining eps spread uniformly
// over the other 2^n - 1; full support for eps > 0.
class PointMassMeasure : public SpectralMeasure {
 public:
  PointMassMeasure(int n, BitString alpha_star, double eps);

  int bit_width() const override { return n_; }
  const BitString& alpha_star() const { return alpha_star_; }
  double eps() const { return eps_; }

  double mass(const BitString& alpha) const override;
  double log_mass(const BitString& alpha) const override;
  BitString sample(SplitMix64& rng) const override;

 private:
  int n_;
  BitString alpha_star_;
  double eps_;
};

}  // namespace qcbm
