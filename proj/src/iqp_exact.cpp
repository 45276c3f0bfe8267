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

#include "qcbm/iqp_exact.hpp"

#include <complex>

#include "qcbm/errors.hpp"
#include "qcbm/walsh.hpp"

namespace qcbm {

namespace {

using Complex = std::complex<double>;

void check_exact_cap(const IqpCircuit& c) {
  const int limit = c.is_generator_mode() ? kMaxDenseBits : kMaxDenseDiagonalBits;
  if (c.total_qubits() > limit)
    throw SizeCapError("exact simulation: m+n exceeds the dense size cap");
}

// Diagonal phase of hidden block k over all visible basis states:
// Phi_k(y) = sum_j theta_j * (-1)^{hidden_j . k  xor  visible_j . y}.
Eigen::VectorXd block_phases(const IqpCircuit& c, std::uint64_t k) {
  const Eigen::Index size = Eigen::Index{1} << c.n_visible();
  if (!c.is_generator_mode())
    return c.dense_phases().segment(static_cast<Eigen::Index>(k) * size, size);
  const std::uint64_t visible_mask = (std::uint64_t{1} << c.n_visible()) - 1;
  Eigen::VectorXd coeff = Eigen::VectorXd::Zero(size);
  for (const GeneratorGate& g : c.gates()) {
    const std::uint64_t hidden_part = g.mask.bits >> c.n_visible();
    const double sign = parity_dot(hidden_part, k) ? -1.0 : 1.0;
    coeff[static_cast<Eigen::Index>(g.mask.bits & visible_mask)] += sign * g.angle;
  }
  walsh_hadamard_inplace<double>(coeff);
  return coeff;
}

}  // namespace

ProbVector exact_visible_distribution(const IqpCircuit& c) {
  check_exact_cap(c);
  const int n = c.n_visible();
  const Eigen::Index size = Eigen::Index{1} << n;
  const std::uint64_t blocks = std::uint64_t{1} << c.m_hidden();
  const double norm = 1.0 / (static_cast<double>(blocks) * std::ldexp(1.0, 2 * n));

  Eigen::VectorXd q = Eigen::VectorXd::Zero(size);
  Eigen::VectorXcd amp(size);
  for (std::uint64_t k = 0; k < blocks; ++k) {
    const Eigen::VectorXd phi = block_phases(c, k);
    for (Eigen::Index y = 0; y < size; ++y) amp[y] = Complex(std::cos(phi[y]), std::sin(phi[y]));
    walsh_hadamard_inplace<Complex>(amp);
    q += norm * amp.cwiseAbs2();
  }
  return ProbVector(n, std::move(q));
}

double exact_z_expectation(const IqpCircuit& c, const BitString& alpha) {
  if (alpha.width != c.n_visible())
    throw std::invalid_argument("exact_z_expectation: alpha width must equal n_visible");
  const ProbVector q = exact_visible_distribution(c);
  double acc = 0.0;
  for (Eigen::Index s = 0; s < q.size(); ++s)
    acc += parity_dot(alpha.bits, static_cast<std::uint64_t>(s)) ? -q.mass()[s] : q.mass()[s];
  return std::clamp(acc, -1.0, 1.0);
}

Eigen::MatrixXd exact_char_gradient(const IqpCircuit& c) {
  check_exact_cap(c);
  const auto& gates = c.gates();
  const int n = c.n_visible();
  const Eigen::Index size = Eigen::Index{1} << n;
  const std::uint64_t blocks = std::uint64_t{1} << c.m_hidden();
  const std::uint64_t visible_mask = (std::uint64_t{1} << n) - 1;
  const double norm = 1.0 / (static_cast<double>(blocks) * std::ldexp(1.0, 2 * n));

  Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(size, static_cast<Eigen::Index>(gates.size()));
  Eigen::VectorXcd amp(size), damp(size);
  for (std::uint64_t k = 0; k < blocks; ++k) {
    const Eigen::VectorXd phi = block_phases(c, k);
    for (Eigen::Index y = 0; y < size; ++y) amp[y] = Complex(std::cos(phi[y]), std::sin(phi[y]));
    Eigen::VectorXcd chi = amp;
    walsh_hadamard_inplace<Complex>(chi);
    for (std::size_t j = 0; j < gates.size(); ++j) {
      const std::uint64_t hidden_part = gates[j].mask.bits >> n;
      const std::uint64_t vis_part = gates[j].mask.bits & visible_mask;
      const double hidden_sign = parity_dot(hidden_part, k) ? -1.0 : 1.0;
      for (Eigen::Index y = 0; y < size; ++y) {
        const double sign = parity_dot(vis_part, static_cast<std::uint64_t>(y)) ? -hidden_sign : hidden_sign;
        damp[y] = Complex(0.0, sign) * amp[y];
      }
      walsh_hadamard_inplace<Complex>(damp);
      dq.col(static_cast<Eigen::Index>(j)) +=
          2.0 * norm * (chi.conjugate().cwiseProduct(damp)).real();
    }
  }
  for (Eigen::Index j = 0; j < dq.cols(); ++j) {
    Eigen::VectorXd col = dq.col(j);
    walsh_hadamard_inplace<double>(col);
    dq.col(j) = col;
  }
  return dq;
}

}  // namespace qcbm
