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

#include "qcbm/datasets.hpp"
#include "qcbm/iqp_exact.hpp"
#include "qcbm/mmd.hpp"
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

// Exact loss as a plain function of the circuit, for finite differences.
double exact_loss(const ProbVector& target, const IqpCircuit& c, const SpectralMeasure& g) {
  return mmd_exact(target, exact_visible_distribution(c), g);
}

}  // namespace

TEST_CASE("mmd exact: zero iff equal, positive otherwise") {
  SplitMix64 rng(71);
  const GaussianMeasure g(6, 0.8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = test::random_prob_vector(6, rng);
    CHECK(mmd_exact(p, p, g) == 0.0);
    const auto q = test::random_prob_vector(6, rng);
    if (tvd(p, q) > 1e-6) CHECK(mmd_exact(p, q, g) > 0.0);
  }
}

TEST_CASE("mmd exact closed forms on the kernel probe") {
  const int n = 10;
  const KernelProbe probe = kernel_sensitivity_instance(n);
  const ProbVector model = exact_visible_distribution(probe.circuit);
  const GaussianMeasure g(n, 1.0);
  const double p_sigma = g.bit_probability();
  CHECK(mmd_exact(probe.target, model, g) ==
        doctest::Approx(0.5 * p_sigma * std::pow(1 - p_sigma, n - 1)).epsilon(1e-12));
  const PointMassMeasure point(n, unit_bit(n, 1), 1e-3);
  CHECK(mmd_exact(probe.target, model, point) == doctest::Approx(0.5 * 0.999).epsilon(1e-12));
}

TEST_CASE("mmd estimate: degenerate all-zeros case is exactly zero") {
  Dataset zeros;
  zeros.n = 6;
  zeros.rows.assign(32, 0);
  std::vector<GeneratorGate> gates;
  for (int j = 1; j <= 6; ++j) gates.push_back({unit_bit(6, j), 0.0});
  const auto c = IqpCircuit::from_generators(6, 0, std::move(gates));
  const auto est = mmd_estimate(zeros, c, GaussianMeasure(6, 0.0), 64, 64, 3);
  CHECK(est.value == 0.0);
  CHECK(mmd_grad_theta(zeros, c, GaussianMeasure(6, 0.0), 64, 64, 3).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mmd estimate input validation") {
  Dataset d;
  d.n = 4;
  d.rows = {1, 2, 3};
  const auto dense = IqpCircuit::from_dense(4, 0, Eigen::VectorXd::Zero(16));
  CHECK_THROWS_AS(mmd_estimate(d, dense, GaussianMeasure(4, 0.0), 10, 10, 1),
                  std::invalid_argument);
  SplitMix64 rng(72);
  const auto c = test::random_circuit(4, 0, 6, rng);
  CHECK_THROWS_AS(mmd_estimate(d, c, GaussianMeasure(4, 0.0), 1, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(mmd_estimate(d, c, GaussianMeasure(4, 0.0), 10, 1, 1), std::invalid_argument);
}

TEST_CASE("mmd estimate is unbiased against the exact value") {
  SplitMix64 rng(73);
  const int n = 8;
  const auto c = test::random_circuit(n, 0, 24, rng);
  const Dataset data = sample_dataset(test::random_prob_vector(n, rng), 500, rng);
  const GaussianMeasure g(n, 0.5);
  const double exact = mmd_exact(empirical_dist(data), exact_visible_distribution(c), g);

  const int seeds = 100;
  double mean = 0.0, sq = 0.0;
  const DataTerm term(data);
  for (int s = 0; s < seeds; ++s) {
    const double v =
        mmd_estimate(term, c, g, 100, 200, derive_stream(900, static_cast<std::uint64_t>(s))).value;
    mean += v;
    sq += v * v;
  }
  mean /= seeds;
  const double se = std::sqrt((sq / seeds - mean * mean) / (seeds - 1));
  CHECK(std::abs(mean - exact) <= 4.0 * se + 1e-12);
}

TEST_CASE("mmd estimate matches the closed form on the kernel probe") {
  const int n = 10;
  const KernelProbe probe = kernel_sensitivity_instance(n);
  const GaussianMeasure g(n, 1.0);
  const double p_sigma = g.bit_probability();
  const double exact = 0.5 * p_sigma * std::pow(1 - p_sigma, n - 1);
  const DataTerm term(probe.target);  // exact uniform data side
  const int seeds = 100;
  double mean = 0.0, sq = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const double v =
        mmd_estimate(term, probe.circuit, g, 200, 200, derive_stream(901, static_cast<std::uint64_t>(s)))
            .value;
    mean += v;
    sq += v * v;
  }
  mean /= seeds;
  const double se = std::sqrt((sq / seeds - mean * mean) / (seeds - 1));
  CHECK(std::abs(mean - exact) <= 4.0 * se + 1e-12);
}

TEST_CASE("theta gradient: exact enumeration matches finite differences") {
  SplitMix64 rng(74);
  for (int trial = 0; trial < 3; ++trial) {
    auto c = test::random_circuit(7, 0, 20, rng);
    const auto target = test::random_prob_vector(7, rng);
    const GaussianMeasure g(7, 0.9);
    const Eigen::VectorXd grad = mmd_exact_grad_theta(target, c, g);
    const Eigen::VectorXd theta = c.angles();
    const double h = 1e-5;
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      Eigen::VectorXd probe = theta;
      probe[j] = theta[j] + h;
      c.set_angles(probe);
      const double up = exact_loss(target, c, g);
      probe[j] = theta[j] - h;
      c.set_angles(probe);
      const double down = exact_loss(target, c, g);
      c.set_angles(theta);
      const double fd = (up - down) / (2 * h);
      if (std::abs(fd) > 1e-4)
        CHECK(grad[j] == doctest::Approx(fd).epsilon(1e-3));
      else
        CHECK(std::abs(grad[j] - fd) < 1e-6);
    }
  }
}

TEST_CASE("theta gradient norm closed form on the kernel probe") {
  const int n = 10;
  const KernelProbe probe = kernel_sensitivity_instance(n);
  const GaussianMeasure g(n, 1.0);
  const double p_sigma = g.bit_probability();
  CHECK(mmd_exact_grad_theta(probe.target, probe.circuit, g).norm() ==
        doctest::Approx(2 * p_sigma * std::pow(1 - p_sigma, n - 1)).epsilon(1e-9));
  const PointMassMeasure point(n, unit_bit(n, 1), 1e-3);
  CHECK(mmd_exact_grad_theta(probe.target, probe.circuit, point).norm() ==
        doctest::Approx(2 * 0.999).epsilon(1e-9));
}

TEST_CASE("sampled theta gradient is unbiased") {
  SplitMix64 rng(75);
  const int n = 6;
  const auto c = test::random_circuit(n, 0, 12, rng);
  const Dataset data = sample_dataset(test::random_prob_vector(n, rng), 400, rng);
  const GaussianMeasure g(n, 0.7);
  const Eigen::VectorXd exact = mmd_exact_grad_theta(empirical_dist(data), c, g);

  const int seeds = 60;
  const DataTerm term(data);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(exact.size());
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(exact.size());
  for (int s = 0; s < seeds; ++s) {
    const Eigen::VectorXd v =
        mmd_grad_theta(term, c, g, 100, 100, derive_stream(902, static_cast<std::uint64_t>(s)));
    mean += v;
    sq += v.cwiseAbs2();
  }
  mean /= seeds;
  for (Eigen::Index j = 0; j < exact.size(); ++j) {
    const double se = std::sqrt((sq[j] / seeds - mean[j] * mean[j]) / (seeds - 1));
    CHECK(std::abs(mean[j] - exact[j]) <= 4.0 * se + 1e-9);
  }
}

TEST_CASE("gamma gradient: exact enumeration matches finite differences") {
  SplitMix64 rng(76);
  const int n = 7;
  const auto p = test::random_prob_vector(n, rng);
  const auto q = test::random_prob_vector(n, rng);
  Fvsbn f = random_fvsbn(n, 0.8, rng);
  const Eigen::VectorXd grad = Fvsbn::pack_gradient(mmd_exact_grad_gamma(p, q, f));

  const Eigen::VectorXd packed = f.pack_parameters();
  const Eigen::VectorXd dphi = walsh_char(p).phi - walsh_char(q).phi;
  auto loss = [&](const Fvsbn& critic) {
    double acc = 0.0;
    for (Eigen::Index a = 0; a < dphi.size(); ++a)
      acc += critic.mass(BitString(static_cast<std::uint64_t>(a), n)) * dphi[a] * dphi[a];
    return acc;
  };
  const double h = 1e-5;
  for (Eigen::Index k = 0; k < packed.size(); ++k) {
    Eigen::VectorXd probe = packed;
    probe[k] = packed[k] + h;
    f.unpack_parameters(probe);
    const double up = loss(f);
    probe[k] = packed[k] - h;
    f.unpack_parameters(probe);
    const double down = loss(f);
    f.unpack_parameters(packed);
    const double fd = (up - down) / (2 * h);
    if (std::abs(fd) > 1e-4)
      CHECK(grad[k] == doctest::Approx(fd).epsilon(1e-2));
    else
      CHECK(std::abs(grad[k] - fd) < 1e-6);
  }
}

TEST_CASE("sampled gamma gradient is unbiased") {
  SplitMix64 rng(77);
  const int n = 6;
  const auto c = test::random_circuit(n, 0, 10, rng);
  const Dataset data = sample_dataset(test::random_prob_vector(n, rng), 300, rng);
  const Fvsbn f = random_fvsbn(n, 0.6, rng);
  const Eigen::VectorXd exact = Fvsbn::pack_gradient(
      mmd_exact_grad_gamma(empirical_dist(data), exact_visible_distribution(c), f));

  const int seeds = 60;
  const DataTerm term(data);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(exact.size());
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(exact.size());
  for (int s = 0; s < seeds; ++s) {
    const Eigen::VectorXd v =
        mmd_grad_gamma(term, c, f, 150, 100, derive_stream(903, static_cast<std::uint64_t>(s)));
    mean += v;
    sq += v.cwiseAbs2();
  }
  mean /= seeds;
  for (Eigen::Index k = 0; k < exact.size(); ++k) {
    const double se = std::sqrt((sq[k] / seeds - mean[k] * mean[k]) / (seeds - 1));
    CHECK(std::abs(mean[k] - exact[k]) <= 4.0 * se + 1e-9);
  }
}

TEST_CASE("gamma gradient vanishes for a perfectly matched model") {
  // When the data term's spectrum equals the model's exactly, every
  // per-frequency product is the product of two zero-mean independent
  // estimates; with exact shots (a uniform target and the zero circuit) the
  // products are identically zero.
  const int n = 5;
  std::vector<GeneratorGate> gates;
  for (int j = 1; j <= n; ++j) gates.push_back({unit_bit(n, j), 0.0});
  const auto c = IqpCircuit::from_generators(n, 0, std::move(gates));
  const DataTerm term(ProbVector::delta(n, 0));  // the model's exact output
  SplitMix64 rng(78);
  const Fvsbn f = random_fvsbn(n, 0.5, rng);
  CHECK(mmd_grad_gamma(term, c, f, 50, 50, 4).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("constant reward reduces the gamma gradient to the score mean") {
  // With (d - Z)^2 constant across frequencies the estimator is that
  // constant times the empirical score mean, which vanishes in expectation.
  SplitMix64 rng(79);
  const int n = 6;
  const Fvsbn f = random_fvsbn(n, 0.7, rng);
  const int draws = 20000;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(f.parameter_count());
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(f.parameter_count());
  SplitMix64 sampler(80);
  for (int i = 0; i < draws; ++i) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(f.parameter_count());
    f.accumulate_grad_log_mass(f.sample(sampler), 0.37, g);
    mean += g;
    sq += g.cwiseAbs2();
  }
  mean /= draws;
  for (Eigen::Index k = 0; k < mean.size(); ++k) {
    const double se = std::sqrt((sq[k] / draws - mean[k] * mean[k]) / (draws - 1));
    CHECK(std::abs(mean[k]) <= 3.5 * se + 1e-9);
  }
}

TEST_CASE("sandwich bound for all three measure families") {
  SplitMix64 rng(81);
  const int n = 8;
  const GaussianMeasure g(n, 1.2);
  const PointMassMeasure point(n, BitString(99, n), 0.05);
  const Fvsbn f = random_fvsbn(n, 0.6, rng);
  const std::vector<const SpectralMeasure*> measures{&g, &point, &f};
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = test::random_prob_vector(n, rng);
    const auto q = test::random_prob_vector(n, rng);
    const double d = tvd(p, q);
    for (const SpectralMeasure* m : measures) {
      const Eigen::VectorXd masses = enumerate_masses(*m);
      const double value = mmd_exact(p, q, *m);
      CHECK(value >= 4.0 * masses.minCoeff() * d * d - 1e-12);
      CHECK(value <= 4.0 * std::ldexp(1.0, n) * masses.maxCoeff() * d * d + 1e-12);
    }
  }
}

TEST_CASE("worst-case ceiling on disjoint flat-spectrum pairs") {
  const auto [p, q] = worst_case_pair(12, 5);
  const Eigen::VectorXd dphi = walsh_char(p).phi - walsh_char(q).phi;
  double sup = 0.0;
  for (Eigen::Index a = 1; a < dphi.size(); ++a) sup = std::max(sup, dphi[a] * dphi[a]);
  SplitMix64 rng(82);
  const GaussianMeasure g(12, 1.0);
  const PointMassMeasure point(12, BitString(1, 12), 1e-3);
  const Fvsbn f = random_fvsbn(12, 0.5, rng);
  CHECK(mmd_exact(p, q, g) <= sup);
  CHECK(mmd_exact(p, q, point) <= sup);
  CHECK(mmd_exact(p, q, f) <= sup);
}

TEST_CASE("mmd batch shares the frequency draw between value and gradients") {
  SplitMix64 rng(83);
  const int n = 6;
  const auto c = test::random_circuit(n, 0, 10, rng);
  const Dataset data = sample_dataset(test::random_prob_vector(n, rng), 200, rng);
  const DataTerm term(data);
  const Fvsbn f = fvsbn_init_gaussian(n, 0.0);
  const MmdBatch batch = mmd_batch(term, c, f, &f, 64, 64, 11, 1, true);
  CHECK(batch.estimate.value == mmd_estimate(term, c, f, 64, 64, 11).value);
  CHECK((batch.grad_theta - mmd_grad_theta(term, c, f, 64, 64, 11)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((batch.grad_gamma - mmd_grad_gamma(term, c, f, 64, 64, 11)).cwiseAbs().maxCoeff() == 0.0);
}
