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

#include "qcbm/fvsbn.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qcbm {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// alpha as a +/-1 column, most significant bit first.
Eigen::VectorXd pm_one(const BitString& alpha) {
  Eigen::VectorXd x(alpha.width);
  for (int i = 1; i <= alpha.width; ++i) x[i - 1] = alpha.bit(i) ? 1.0 : -1.0;
  return x;
}

}  // namespace

Fvsbn::Fvsbn(int n, Eigen::MatrixXd w, Eigen::VectorXd b, double eps)
    : n_(n), w_(std::move(w)), b_(std::move(b)), eps_(eps) {
  if (n < 1 || n > 63) throw std::invalid_argument("Fvsbn: width must be in [1, 63]");
  if (w_.rows() != n || w_.cols() != n) throw std::invalid_argument("Fvsbn: W must be n x n");
  if (b_.size() != n) throw std::invalid_argument("Fvsbn: b must have length n");
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("Fvsbn: eps must be in (0, 0.5)");
  for (int i = 0; i < n; ++i)
    for (int r = i; r < n; ++r)
      if (w_(i, r) != 0.0)
        throw std::invalid_argument("Fvsbn: W must be strictly lower triangular");
}

double Fvsbn::log_mass(const BitString& alpha) const {
  if (alpha.width != n_) throw std::invalid_argument("Fvsbn::log_mass: width mismatch");
  const Eigen::VectorXd x = pm_one(alpha);
  // The strictly-lower structure makes the full product autoregressive.
  const Eigen::VectorXd raw = b_ + w_ * x;
  double acc = 0.0;
  for (int i = 0; i < n_; ++i) {
    const double p = eps_ + (1.0 - 2.0 * eps_) * sigmoid(raw[i]);
    acc += x[i] > 0 ? std::log(p) : std::log1p(-p);
  }
  return acc;
}

double Fvsbn::mass(const BitString& alpha) const { return std::exp(log_mass(alpha)); }

BitString Fvsbn::sample(SplitMix64& rng) const {
  Eigen::VectorXd x(n_);
  std::uint64_t bits = 0;
  for (int i = 0; i < n_; ++i) {
    double raw = b_[i];
    for (int r = 0; r < i; ++r) raw += w_(i, r) * x[r];
    const double p = eps_ + (1.0 - 2.0 * eps_) * sigmoid(raw);
    const bool one = rng.next_bernoulli(p);
    x[i] = one ? 1.0 : -1.0;
    bits = (bits << 1) | (one ? 1u : 0u);
  }
  return BitString(bits, n_);
}

FvsbnGrad Fvsbn::grad_log_mass(const BitString& alpha) const {
  if (alpha.width != n_) throw std::invalid_argument("Fvsbn::grad_log_mass: width mismatch");
  const Eigen::VectorXd x = pm_one(alpha);
  const Eigen::VectorXd raw = b_ + w_ * x;
  FvsbnGrad g{Eigen::MatrixXd::Zero(n_, n_), Eigen::VectorXd::Zero(n_)};
  const double floor = 0.25 * eps_ * eps_;
  for (int i = 0; i < n_; ++i) {
    const double s = sigmoid(raw[i]);
    const double p = eps_ + (1.0 - 2.0 * eps_) * s;
    const double a_i = x[i] > 0 ? 1.0 : 0.0;
    const double factor =
        (a_i - p) * (1.0 - 2.0 * eps_) * s * (1.0 - s) / std::max(p * (1.0 - p), floor);
    g.db[i] = factor;
    for (int r = 0; r < i; ++r) g.dW(i, r) = factor * x[r];
  }
  return g;
}

void Fvsbn::accumulate_grad_log_mass(const BitString& alpha, double scale,
                                     Eigen::VectorXd& packed_acc) const {
  if (alpha.width != n_) throw std::invalid_argument("Fvsbn: width mismatch");
  if (packed_acc.size() != parameter_count())
    throw std::invalid_argument("Fvsbn: accumulator size mismatch");
  const double floor = 0.25 * eps_ * eps_;
  Eigen::Index k = n_;
  double raw_cache[64];
  double x_cache[64];
  for (int i = 0; i < n_; ++i) {
    x_cache[i] = alpha.bit(i + 1) ? 1.0 : -1.0;
    double raw = b_[i];
    for (int r = 0; r < i; ++r) raw += w_(i, r) * x_cache[r];
    raw_cache[i] = raw;
  }
  for (int i = 0; i < n_; ++i) {
    const double s = sigmoid(raw_cache[i]);
    const double p = eps_ + (1.0 - 2.0 * eps_) * s;
    const double a_i = x_cache[i] > 0 ? 1.0 : 0.0;
    const double factor =
        scale * (a_i - p) * (1.0 - 2.0 * eps_) * s * (1.0 - s) / std::max(p * (1.0 - p), floor);
    packed_acc[i] += factor;
  }
  for (int i = 1; i < n_; ++i) {
    const double s = sigmoid(raw_cache[i]);
    const double p = eps_ + (1.0 - 2.0 * eps_) * s;
    const double a_i = x_cache[i] > 0 ? 1.0 : 0.0;
    const double factor =
        scale * (a_i - p) * (1.0 - 2.0 * eps_) * s * (1.0 - s) / std::max(p * (1.0 - p), floor);
    for (int r = 0; r < i; ++r) packed_acc[k++] += factor * x_cache[r];
  }
}

Eigen::Index Fvsbn::parameter_count() const {
  return n_ + static_cast<Eigen::Index>(n_) * (n_ - 1) / 2;
}

Eigen::VectorXd Fvsbn::pack_parameters() const {
  Eigen::VectorXd out(parameter_count());
  out.head(n_) = b_;
  Eigen::Index k = n_;
  for (int i = 1; i < n_; ++i)
    for (int r = 0; r < i; ++r) out[k++] = w_(i, r);
  return out;
}

void Fvsbn::unpack_parameters(const Eigen::VectorXd& packed) {
  if (packed.size() != parameter_count())
    throw std::invalid_argument("Fvsbn::unpack_parameters: size mismatch");
  b_ = packed.head(n_);
  Eigen::Index k = n_;
  for (int i = 1; i < n_; ++i)
    for (int r = 0; r < i; ++r) w_(i, r) = packed[k++];
}

Eigen::VectorXd Fvsbn::pack_gradient(const FvsbnGrad& g) {
  const int n = static_cast<int>(g.db.size());
  Eigen::VectorXd out(n + static_cast<Eigen::Index>(n) * (n - 1) / 2);
  out.head(n) = g.db;
  Eigen::Index k = n;
  for (int i = 1; i < n; ++i)
    for (int r = 0; r < i; ++r) out[k++] = g.dW(i, r);
  return out;
}

Fvsbn fvsbn_init_gaussian(int n, double sigma, double eps) {
  if (sigma < 0.0) throw std::invalid_argument("fvsbn_init_gaussian: sigma must be >= 0");
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  if (sigma != 0.0) {
    const double p = GaussianMeasure(n, sigma).bit_probability();
    if (p <= eps || p >= 1.0 - eps)
      throw std::domain_error("fvsbn_init_gaussian: bit probability collides with the eps clamp");
    b.setConstant(std::log(p - eps) - std::log(1.0 - p - eps));
  }
  return Fvsbn(n, Eigen::MatrixXd::Zero(n, n), std::move(b), eps);
}

Fvsbn fvsbn_init_warm(int n, double strength, double eps) {
  if (n != 12) throw std::invalid_argument("fvsbn_init_warm: only the 12-bit warm start is defined");
  const double k = strength;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  // Bit 1 picks a branch; bits 2-4 copy it, bit 5 is forced or balanced by
  // it, bits 6-8 copy bit 5, and bits 9-12 fire only when bits 1 and 5
  // disagree or are both clear. Indices below are 0-based.
  b[0] = std::log(2.0);
  b[4] = k / 2.0;
  b[8] = b[9] = b[10] = b[11] = k;
  w(1, 0) = w(2, 0) = w(3, 0) = k;
  w(5, 4) = w(6, 4) = w(7, 4) = k;
  w(8, 0) = w(9, 0) = w(10, 0) = w(11, 0) = -k;
  w(8, 4) = w(9, 4) = w(10, 4) = w(11, 4) = -k;
  w(4, 0) = -k / 2.0;
  return Fvsbn(n, std::move(w), std::move(b), eps);
}

void write_fvsbn(const std::string& path, const Fvsbn& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_fvsbn: cannot open " + path);
  char buf[96];
  std::snprintf(buf, sizeof buf, "#fvsbn n=%d eps=%.17g\n", f.bit_width(), f.eps());
  out << buf;
  for (int i = 0; i < f.bit_width(); ++i) {
    std::snprintf(buf, sizeof buf, "b %d %.17g\n", i, f.b()[i]);
    out << buf;
  }
  for (int i = 1; i < f.bit_width(); ++i)
    for (int r = 0; r < i; ++r)
      if (f.w()(i, r) != 0.0) {
        std::snprintf(buf, sizeof buf, "W %d %d %.17g\n", i, r, f.w()(i, r));
        out << buf;
      }
  if (!out) throw std::runtime_error("write_fvsbn: write failed for " + path);
}

Fvsbn read_fvsbn(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_fvsbn: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("#fvsbn ", 0) != 0)
    throw std::runtime_error("read_fvsbn: missing header in " + path);
  int n = -1;
  double eps = -1.0;
  {
    std::istringstream hs(line.substr(7));
    std::string tok;
    while (hs >> tok) {
      if (tok.rfind("n=", 0) == 0) n = std::stoi(tok.substr(2));
      else if (tok.rfind("eps=", 0) == 0) eps = std::stod(tok.substr(4));
    }
  }
  if (n < 1 || eps <= 0.0) throw std::runtime_error("read_fvsbn: malformed header in " + path);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "b") {
      int i;
      double v;
      if (!(ls >> i >> v)) throw std::runtime_error("read_fvsbn: bad b line in " + path);
      b[i] = v;
    } else if (kind == "W") {
      int i, r;
      double v;
      if (!(ls >> i >> r >> v)) throw std::runtime_error("read_fvsbn: bad W line in " + path);
      w(i, r) = v;
    } else {
      throw std::runtime_error("read_fvsbn: unknown record '" + kind + "' in " + path);
    }
  }
  return Fvsbn(n, std::move(w), std::move(b), eps);
}

}  // namespace qcbm
