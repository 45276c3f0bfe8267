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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qcbm/fvsbn.hpp"
#include "qcbm/spectral_measure.hpp"
#include "qcbm/walsh.hpp"
#include "test_util.hpp"

using namespace qcbm;

namespace {

Fvsbn random_fvsbn(int n, double scale, SplitMix64& rng) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    b[i] = scale * (2 * rng.next_double() - 1);
    for (int r = 0; r < i; ++r) w(i, r) = scale * (2 * rng.next_double() - 1);
  }
  return Fvsbn(n, std::move(w), std::move(b));
}

double chi_square_uniform(const std::vector<std::int64_t>& counts, std::int64_t total) {
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  double stat = 0.0;
  for (std::int64_t c : counts) {
    const double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  return stat;
}

}  // namespace

TEST_CASE("gaussian bit probability and masses") {
  const GaussianMeasure flat(4, 0.0);
  CHECK(flat.bit_probability() == 0.5);
  for (std::uint64_t a = 0; a < 16; ++a)
    CHECK(flat.mass(BitString(a, 4)) == doctest::Approx(1.0 / 16).epsilon(1e-15));

  const GaussianMeasure wide(6, 1e4);
  CHECK(wide.bit_probability() > 0.0);
  CHECK(wide.mass(BitString(0, 6)) == doctest::Approx(1.0).epsilon(1e-6));

  // sigma^2 = 1/(2 ln 2) makes the bit probability exactly 1/4
  const double sigma = std::sqrt(1.0 / (2.0 * std::log(2.0)));
  const GaussianMeasure quarter(1, sigma);
  CHECK(quarter.bit_probability() == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(quarter.mass(BitString(1, 1)) == doctest::Approx(0.25).epsilon(1e-14));

  CHECK_THROWS_AS(GaussianMeasure(4, -1.0), std::invalid_argument);
}

TEST_CASE("all measures sum to one by enumeration") {
  SplitMix64 rng(51);
  const GaussianMeasure g(10, 0.7);
  CHECK(enumerate_masses(g).sum() == doctest::Approx(1.0).epsilon(1e-9));
  const PointMassMeasure p(6, BitString(5, 6), 0.01);
  CHECK(enumerate_masses(p).sum() == doctest::Approx(1.0).epsilon(1e-12));
  const Fvsbn f = random_fvsbn(8, 0.8, rng);
  CHECK(enumerate_masses(f).sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("full support for every family") {
  SplitMix64 rng(52);
  CHECK(enumerate_masses(GaussianMeasure(8, 3.0)).minCoeff() > 0.0);
  CHECK(enumerate_masses(PointMassMeasure(8, BitString(17, 8), 1e-3)).minCoeff() > 0.0);
  CHECK(enumerate_masses(random_fvsbn(8, 2.0, rng)).minCoeff() > 0.0);
}

TEST_CASE("point mass values") {
  const BitString star(9, 6);
  const PointMassMeasure p(6, star, 0.25);
  CHECK(p.mass(star) == 0.75);
  CHECK(p.mass(BitString(10, 6)) == doctest::Approx(0.25 / 63).epsilon(1e-15));
  CHECK_THROWS_AS(PointMassMeasure(6, star, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(PointMassMeasure(6, star, 1.0), std::invalid_argument);
}

TEST_CASE("gaussian sampling: uniformity, weight moments") {
  SplitMix64 rng(53);
  const GaussianMeasure flat(8, 0.0);
  std::vector<std::int64_t> counts(256, 0);
  const int draws = 100000;
  double weight_sum = 0.0;
  for (int i = 0; i < draws; ++i) {
    const BitString s = flat.sample(rng);
    ++counts[static_cast<std::size_t>(s.bits)];
    weight_sum += hamming_weight(s);
  }
  CHECK(chi_square_uniform(counts, draws) < test::kChi2Crit255);
  // Hamming-weight mean within 3 binomial sigmas
  const double mean = weight_sum / draws;
  const double sigma3 = 3.0 * std::sqrt(8 * 0.25 / draws);
  CHECK(std::abs(mean - 4.0) < sigma3);

  const GaussianMeasure narrow(8, 50.0);
  double ones = 0.0;
  for (int i = 0; i < 1000; ++i) ones += hamming_weight(narrow.sample(rng));
  CHECK(ones / 1000.0 == doctest::Approx(8 * narrow.bit_probability()).epsilon(0.5));
}

TEST_CASE("sampling matches enumerated masses in TVD for all families") {
  SplitMix64 rng(54);
  const int n = 6;
  const int draws = 100000;
  const GaussianMeasure g(n, 1.0);
  const PointMassMeasure p(n, BitString(33, n), 0.2);
  const Fvsbn f = random_fvsbn(n, 0.7, rng);
  for (const SpectralMeasure* m : {static_cast<const SpectralMeasure*>(&g),
                                   static_cast<const SpectralMeasure*>(&p),
                                   static_cast<const SpectralMeasure*>(&f)}) {
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(1 << n);
    for (int i = 0; i < draws; ++i) counts[static_cast<Eigen::Index>(m->sample(rng).bits)] += 1.0;
    counts /= draws;
    const double dist = 0.5 * (counts - enumerate_masses(*m)).cwiseAbs().sum();
    CHECK(dist < 0.02);
  }
}

TEST_CASE("fvsbn log mass: zero parameters give the uniform measure exactly") {
  const Fvsbn f(3, Eigen::MatrixXd::Zero(3, 3), Eigen::VectorXd::Zero(3));
  for (std::uint64_t a = 0; a < 8; ++a)
    CHECK(f.log_mass(BitString(a, 3)) == doctest::Approx(-3 * std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("fvsbn rejects structure violations") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
  w(0, 2) = 0.5;  // upper triangle
  CHECK_THROWS_AS(Fvsbn(3, w, Eigen::VectorXd::Zero(3)), std::invalid_argument);
  w.setZero();
  w(1, 1) = 0.1;  // diagonal
  CHECK_THROWS_AS(Fvsbn(3, w, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("gaussian-initialized fvsbn reproduces the gaussian measure") {
  for (double sigma : {0.0, 0.6, 1.3}) {
    const int n = 12;
    const Fvsbn f = fvsbn_init_gaussian(n, sigma);
    const GaussianMeasure g(n, sigma);
    const Eigen::VectorXd fm = enumerate_masses(f);
    const Eigen::VectorXd gm = enumerate_masses(g);
    for (Eigen::Index a = 0; a < fm.size(); ++a)
      CHECK(fm[a] == doctest::Approx(gm[a]).epsilon(1e-9));
  }
  // bias formula at bit probability 1/4
  const double sigma = std::sqrt(1.0 / (2.0 * std::log(2.0)));
  const Fvsbn f = fvsbn_init_gaussian(1, sigma);
  const double eps = f.eps();
  CHECK(f.b()[0] ==
        doctest::Approx(std::log(0.25 - eps) - std::log(0.75 - eps)).epsilon(1e-12));
  CHECK(fvsbn_init_gaussian(5, 0.0).b().cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(fvsbn_init_gaussian(5, -1.0), std::invalid_argument);
}

TEST_CASE("warm start concentrates on the three parity frequencies") {
  const Fvsbn f = fvsbn_init_warm(12, 10.0);
  CHECK_THROWS_AS(fvsbn_init_warm(10, 10.0), std::invalid_argument);
  CHECK(f.b()[0] == doctest::Approx(std::log(2.0)));
  CHECK(f.b()[4] == 5.0);
  CHECK(f.w()(1, 0) == 10.0);
  CHECK(f.w()(4, 0) == -5.0);
  CHECK(f.w()(11, 4) == -10.0);

  const std::uint64_t head = bitstring_from_string("111111110000").bits;
  const std::uint64_t tail = bitstring_from_string("000011111111").bits;
  const Eigen::VectorXd masses = enumerate_masses(f);
  const double on_three = masses[static_cast<Eigen::Index>(head)] +
                          masses[static_cast<Eigen::Index>(tail)] +
                          masses[static_cast<Eigen::Index>(head ^ tail)];
  CHECK(on_three > 0.99);
  CHECK(masses[static_cast<Eigen::Index>(head)] > 0.31);
  CHECK(masses[static_cast<Eigen::Index>(tail)] > 0.31);
  CHECK(masses[static_cast<Eigen::Index>(head ^ tail)] > 0.31);

  // strength 0 degenerates toward independent bits with only b_1 = ln 2 left
  const Fvsbn cold = fvsbn_init_warm(12, 0.0);
  CHECK(cold.b()[0] == doctest::Approx(std::log(2.0)));
  CHECK(cold.b().tail(11).cwiseAbs().maxCoeff() == 0.0);
  CHECK(cold.w().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fvsbn gradient closed form at zero parameters") {
  const int n = 5;
  const Fvsbn f(n, Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n));
  SplitMix64 rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    const BitString alpha = rng.next_bitstring(n);
    const FvsbnGrad g = f.grad_log_mass(alpha);
    for (int i = 0; i < n; ++i) {
      const double a_i = alpha.bit(i + 1);
      CHECK(g.db[i] == doctest::Approx((a_i - 0.5) * (1 - 2 * f.eps())).epsilon(1e-12));
    }
  }
}

TEST_CASE("fvsbn gradient matches finite differences") {
  SplitMix64 rng(56);
  const int n = 10;
  Fvsbn f = random_fvsbn(n, 1.1, rng);
  for (int trial = 0; trial < 5; ++trial) {
    const BitString alpha = rng.next_bitstring(n);
    const FvsbnGrad g = f.grad_log_mass(alpha);
    const Eigen::VectorXd packed = f.pack_parameters();
    const double h = 1e-6;
    const Eigen::VectorXd packed_grad = Fvsbn::pack_gradient(g);
    for (Eigen::Index k = 0; k < packed.size(); ++k) {
      Eigen::VectorXd probe = packed;
      probe[k] = packed[k] + h;
      f.unpack_parameters(probe);
      const double up = f.log_mass(alpha);
      probe[k] = packed[k] - h;
      f.unpack_parameters(probe);
      const double down = f.log_mass(alpha);
      f.unpack_parameters(packed);
      const double fd = (up - down) / (2 * h);
      if (std::abs(fd) > 1e-7)
        CHECK(packed_grad[k] == doctest::Approx(fd).epsilon(1e-5));
      else
        CHECK(std::abs(packed_grad[k] - fd) < 1e-8);
    }
  }
}

TEST_CASE("accumulate_grad_log_mass agrees with the packed gradient") {
  SplitMix64 rng(57);
  const Fvsbn f = random_fvsbn(7, 0.9, rng);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.parameter_count());
  const BitString alpha = rng.next_bitstring(7);
  f.accumulate_grad_log_mass(alpha, 2.5, acc);
  const Eigen::VectorXd expected = 2.5 * Fvsbn::pack_gradient(f.grad_log_mass(alpha));
  CHECK((acc - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("score function has zero mean") {
  SplitMix64 rng(58);
  const Fvsbn f = random_fvsbn(6, 0.8, rng);
  const int draws = 100000;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(f.parameter_count());
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(f.parameter_count());
  for (int i = 0; i < draws; ++i) {
    const Eigen::VectorXd g = Fvsbn::pack_gradient(f.grad_log_mass(f.sample(rng)));
    mean += g;
    sq += g.cwiseAbs2();
  }
  mean /= draws;
  for (Eigen::Index k = 0; k < mean.size(); ++k) {
    const double se = std::sqrt((sq[k] / draws - mean[k] * mean[k]) / (draws - 1));
    CHECK(std::abs(mean[k]) <= 3.0 * se + 1e-9);
  }
}

TEST_CASE("fvsbn saturated bias pins bits at 1 - eps") {
  const int n = 4;
  Eigen::VectorXd b = Eigen::VectorXd::Constant(n, 50.0);
  const Fvsbn f(n, Eigen::MatrixXd::Zero(n, n), b);
  const double full = f.mass(BitString((1 << n) - 1, n));
  CHECK(full == doctest::Approx(std::pow(1.0 - f.eps(), n)).epsilon(1e-9));
  SplitMix64 rng(59);
  for (int i = 0; i < 20; ++i) CHECK(f.sample(rng).bits == (1u << n) - 1);
}

TEST_CASE("fvsbn checkpoint round trip") {
  const std::string dir = test::fresh_dir("fvsbn");
  SplitMix64 rng(60);
  const Fvsbn f = random_fvsbn(9, 1.7, rng);
  write_fvsbn(dir + "/f.txt", f);
  const Fvsbn back = read_fvsbn(dir + "/f.txt");
  CHECK(back.bit_width() == f.bit_width());
  CHECK(back.eps() == f.eps());
  CHECK((back.b() - f.b()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.w() - f.w()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gaussian measure is the spectrum of the binary product kernel") {
  for (double sigma : {0.5, 1.0, 2.0}) {
    const int n = 10;
    Eigen::VectorXd kernel_column(1 << n);
    for (Eigen::Index b = 0; b < kernel_column.size(); ++b)
      kernel_column[b] = std::exp(-std::popcount(static_cast<std::uint64_t>(b)) /
                                  (2.0 * sigma * sigma));
    walsh_hadamard_inplace<double>(kernel_column);
    kernel_column /= std::ldexp(1.0, n);
    const Eigen::VectorXd expected = enumerate_masses(GaussianMeasure(n, sigma));
    CHECK((kernel_column - expected).cwiseAbs().maxCoeff() < 1e-9);
  }
}
