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

#include "qcbm/prob_vector.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qcbm/errors.hpp"
#include "qcbm/walsh.hpp"

namespace qcbm {

namespace {
constexpr double kNormTolerance = 1e-9;
constexpr double kNegativeDust = 1e-12;

void check_width(int n) {
  if (n < 1) throw std::invalid_argument("ProbVector: bit width must be positive");
  if (n > kMaxDenseBits) throw SizeCapError("ProbVector: bit width exceeds dense cap of 24");
}
}  // namespace

ProbVector::ProbVector(int n, Eigen::VectorXd mass) : n_(n), mass_(std::move(mass)) {
  check_width(n);
  if (mass_.size() != (Eigen::Index{1} << n))
    throw std::invalid_argument("ProbVector: mass length must be 2^n");
  for (Eigen::Index i = 0; i < mass_.size(); ++i) {
    const double v = mass_[i];
    if (!std::isfinite(v)) throw std::invalid_argument("ProbVector: non-finite entry");
    if (v < 0.0) {
      if (v < -kNegativeDust) throw std::invalid_argument("ProbVector: negative entry");
      mass_[i] = 0.0;
    }
  }
  const double sum = mass_.sum();
  if (std::abs(sum - 1.0) > kNormTolerance)
    throw std::invalid_argument("ProbVector: mass sums to " + std::to_string(sum));
  mass_ /= sum;
}

ProbVector ProbVector::uniform(int n) {
  check_width(n);
  const Eigen::Index size = Eigen::Index{1} << n;
  return ProbVector(n, Eigen::VectorXd::Constant(size, 1.0 / static_cast<double>(size)));
}

ProbVector ProbVector::delta(int n, std::uint64_t x) {
  check_width(n);
  Eigen::VectorXd m = Eigen::VectorXd::Zero(Eigen::Index{1} << n);
  m[static_cast<Eigen::Index>(x)] = 1.0;
  return ProbVector(n, std::move(m));
}

double tvd(const ProbVector& p, const ProbVector& q) {
  if (p.bit_width() != q.bit_width()) throw std::invalid_argument("tvd: width mismatch");
  return 0.5 * (p.mass() - q.mass()).cwiseAbs().sum();
}

CharSpectrum walsh_char(const ProbVector& p) {
  CharSpectrum s;
  s.n = p.bit_width();
  s.phi = p.mass();
  walsh_hadamard_inplace<double>(s.phi);
  // |phi| <= 1 exactly; trim float dust so downstream [-1,1] invariants hold.
  s.phi = s.phi.cwiseMax(-1.0).cwiseMin(1.0);
  return s;
}

ProbVector inverse_walsh(const CharSpectrum& s) {
  Eigen::VectorXd m = s.phi;
  walsh_hadamard_inplace<double>(m);
  m /= static_cast<double>(m.size());
  return ProbVector(s.n, std::move(m));
}

void write_prob_vector(const std::string& path, const ProbVector& p) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_prob_vector: cannot open " + path);
  out << "#dist n=" << p.bit_width() << "\n";
  char buf[64];
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g\n", p.mass()[i]);
    out << buf;
  }
  if (!out) throw std::runtime_error("write_prob_vector: write failed for " + path);
}

ProbVector read_prob_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_prob_vector: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("#dist n=", 0) != 0)
    throw std::runtime_error("read_prob_vector: missing '#dist n=' header in " + path);
  const int n = std::stoi(line.substr(8));
  check_width(n);
  const Eigen::Index size = Eigen::Index{1} << n;
  Eigen::VectorXd m(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    if (!std::getline(in, line))
      throw std::runtime_error("read_prob_vector: truncated file " + path);
    m[i] = std::stod(line);
  }
  return ProbVector(n, std::move(m));
}

}  // namespace qcbm
