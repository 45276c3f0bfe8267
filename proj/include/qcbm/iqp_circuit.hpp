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
#include <string>
#include <vector>

#include "qcbm/bitstring.hpp"

namespace qcbm {

// Dense per-basis-state phase tables are capped at 2^21 entries.
inline constexpr int kMaxDenseDiagonalBits = 21;

// One diagonal phase gate: a product of Pauli-Z factors on the qubits in
// `mask` (width m+n, nonzero), rotated by `angle`. Angles are stored
// unreduced; optimizers may step outside [0, 2pi).
struct GeneratorGate {
  BitString mask;
  double angle = 0.0;
};

// A Hadamard-conjugated diagonal circuit on m hidden + n visible qubits.
// Hidden qubits occupy the leading (most significant) m index positions and
// are traced out before measurement. The diagonal is either a list of
// generator gates or a dense phase per basis state of width m+n.
class IqpCircuit {
 public:
  static IqpCircuit from_generators(int n_visible, int m_hidden, std::vector<GeneratorGate> gates);
  static IqpCircuit from_dense(int n_visible, int m_hidden, Eigen::VectorXd phases);

  int n_visible() const { return n_; }
  int m_hidden() const { return m_; }
  int total_qubits() const { return n_ + m_; }
  bool is_generator_mode() const { return generator_mode_; }

  const std::vector<GeneratorGate>& gates() const;
  const Eigen::VectorXd& dense_phases() const;

  // Gate angles as a flat vector, in gate order. Training steps go through
  // these two accessors so the gate list itself stays fixed.
  Eigen::VectorXd angles() const;
  void set_angles(const Eigen::VectorXd& theta);

 private:
  IqpCircuit() = default;

  int n_ = 0;
  int m_ = 0;
  bool generator_mode_ = true;
  std::vector<GeneratorGate> gates_;
  Eigen::VectorXd dense_phases_;
};

// Checkpoint text format: header with sizes and mode, then one line per gate
// "mask_bits angle" (generator mode) or one phase per line (dense mode).
// Angles survive a round trip exactly (17 significant digits).
void write_circuit(const std::string& path, const IqpCircuit& c);
IqpCircuit read_circuit(const std::string& path);

}  // namespace qcbm
