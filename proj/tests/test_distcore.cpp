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

#include "qcbm/dataset.hpp"
#include "qcbm/prob_vector.hpp"
#include "qcbm/walsh.hpp"
#include "test_util.hpp"

using namespace qcbm;

TEST_CASE("tvd basic values") {
  const auto p = ProbVector::delta(2, 0);
  const auto q = ProbVector::delta(2, 3);
  CHECK(tvd(p, p) == 0.0);
  CHECK(tvd(p, q) == 1.0);

  Eigen::VectorXd thirds(4);
  thirds << 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0;
  CHECK(tvd(ProbVector(2, thirds), ProbVector::uniform(2)) == doctest::Approx(0.25).epsilon(1e-12));

  CHECK_THROWS_AS(tvd(p, ProbVector::uniform(3)), std::invalid_argument);
}

TEST_CASE("tvd is a metric on random triples") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = test::random_prob_vector(5, rng);
    const auto b = test::random_prob_vector(5, rng);
    const auto c = test::random_prob_vector(5, rng);
    const double ab = tvd(a, b), ba = tvd(b, a), ac = tvd(a, c), cb = tvd(c, b);
    CHECK(ab == ba);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(ab <= ac + cb + 1e-12);
  }
}

TEST_CASE("prob vector construction rules") {
  Eigen::VectorXd m(4);
  m << 0.25, 0.25, 0.25, 0.25 + 5e-10;
  const ProbVector p(2, m);  // renormalized
  CHECK(p.mass().sum() == doctest::Approx(1.0).epsilon(1e-15));

  m << 0.3, 0.3, 0.3, 0.3;
  CHECK_THROWS_AS(ProbVector(2, m), std::invalid_argument);
  m << 0.5, 0.5, -1e-3, 1e-3;
  CHECK_THROWS_AS(ProbVector(2, m), std::invalid_argument);
  m << 0.5, 0.5, -1e-13, 1e-13;  // dust clamps to zero
  CHECK(ProbVector(2, m)[2] == 0.0);
}

TEST_CASE("walsh characteristic values") {
  const auto uniform = walsh_char(ProbVector::uniform(4));
  CHECK(uniform.phi[0] == doctest::Approx(1.0).epsilon(1e-12));
  for (Eigen::Index a = 1; a < uniform.phi.size(); ++a) CHECK(uniform.phi[a] == 0.0);

  const auto point = walsh_char(ProbVector::delta(4, 0));
  for (Eigen::Index a = 0; a < point.phi.size(); ++a) CHECK(point.phi[a] == 1.0);
}

TEST_CASE("walsh transform matches the quadratic-cost double sum at n=6") {
  SplitMix64 rng(21);
  const auto p = test::random_prob_vector(6, rng);
  const auto fast = walsh_char(p);
  for (Eigen::Index a = 0; a < fast.phi.size(); ++a) {
    double slow = 0.0;
    for (Eigen::Index x = 0; x < p.size(); ++x)
      slow += parity_dot(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(x))
                  ? -p.mass()[x]
                  : p.mass()[x];
    CHECK(fast.phi[a] == doctest::Approx(slow).epsilon(1e-12));
  }
}

TEST_CASE("walsh round trip and Parseval") {
  SplitMix64 rng(22);
  for (int n : {3, 8, 10}) {
    const auto p = test::random_prob_vector(n, rng);
    const auto spec = walsh_char(p);
    const auto back = inverse_walsh(spec);
    CHECK((back.mass() - p.mass()).cwiseAbs().maxCoeff() < 1e-12);
    const double lhs = spec.phi.squaredNorm();
    const double rhs = std::ldexp(1.0, n) * p.mass().squaredNorm();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("spectral Parseval for differences of distributions") {
  SplitMix64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = test::random_prob_vector(7, rng);
    const auto q = test::random_prob_vector(7, rng);
    const double lhs = (walsh_char(p).phi - walsh_char(q).phi).squaredNorm();
    const double rhs = 128.0 * (p.mass() - q.mass()).squaredNorm();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("data z expectation") {
  Dataset d;
  d.n = 2;
  d.rows = {0b00, 0b11};
  CHECK(data_z_expectation(d, BitString(0, 2)) == 1.0);
  CHECK(data_z_expectation(d, BitString(0b11, 2)) == 1.0);
  CHECK(data_z_expectation(d, BitString(0b10, 2)) == 0.0);

  Dataset zeros;
  zeros.n = 3;
  zeros.rows = {0, 0, 0};
  for (std::uint64_t a = 0; a < 8; ++a) CHECK(data_z_expectation(zeros, BitString(a, 3)) == 1.0);

  Dataset empty;
  empty.n = 2;
  CHECK_THROWS_AS(data_z_expectation(empty, BitString(0, 2)), std::invalid_argument);
  CHECK_THROWS_AS(data_z_expectation(d, BitString(0, 3)), std::invalid_argument);
}

TEST_CASE("empirical distribution") {
  Dataset d;
  d.n = 1;
  d.rows = {0, 1};
  const auto p = empirical_dist(d);
  CHECK(p[0] == 0.5);
  CHECK(p[1] == 0.5);

  Dataset single;
  single.n = 3;
  single.rows = {5};
  const auto q = empirical_dist(single);
  CHECK(q[5] == 1.0);
  CHECK(q.mass().sum() == 1.0);
}

TEST_CASE("dataset file round trip") {
  const std::string dir = test::fresh_dir("distcore");
  Dataset d;
  d.n = 5;
  SplitMix64 rng(3);
  for (int i = 0; i < 64; ++i) d.rows.push_back(rng.next_bits(5));
  write_dataset(dir + "/d.txt", d);
  const Dataset back = read_dataset(dir + "/d.txt");
  CHECK(back.n == d.n);
  CHECK(back.rows == d.rows);
}

TEST_CASE("prob vector file round trip") {
  const std::string dir = test::fresh_dir("distfile");
  SplitMix64 rng(4);
  const auto p = test::random_prob_vector(6, rng);
  write_prob_vector(dir + "/p.txt", p);
  const auto back = read_prob_vector(dir + "/p.txt");
  CHECK(back.bit_width() == 6);
  CHECK((back.mass() - p.mass()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dataset sampling follows the distribution") {
  SplitMix64 rng(5);
  const auto p = test::random_prob_vector(4, rng);
  const Dataset d = sample_dataset(p, 100000, rng);
  CHECK(tvd(empirical_dist(d), p) < 0.02);
}

TEST_CASE("bitstring conventions") {
  const BitString s = bitstring_from_string("0110");
  CHECK(s.bits == 6);
  CHECK(s.width == 4);
  CHECK(s.bit(1) == 0);
  CHECK(s.bit(2) == 1);
  CHECK(to_string(s) == "0110");
  CHECK(hamming_weight(s) == 2);
  CHECK(unit_bit(4, 1).bits == 8);
  CHECK(parity_dot(bitstring_from_string("110"), bitstring_from_string("011")) == 1);
}
