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

#include "qcbm/iqp_circuit.hpp"
#include "qcbm/prob_vector.hpp"

namespace qcbm {

// Exact statevector simulation of the measured marginal: builds the
// uniform-amplitude state with the circuit's diagonal phases, applies
// Hadamards to the visible qubits, and sums |amplitude|^2 over the hidden
// index. Size caps: m+n <= 21 in dense mode, m+n <= 24 in generator mode.
ProbVector exact_visible_distribution(const IqpCircuit& c);

// sum_s q(s) (-1)^{alpha . s} for the visible marginal q.
double exact_z_expectation(const IqpCircuit& c, const BitString& alpha);

// d phi_q(alpha) / d theta_j for every frequency alpha and gate j, by
// differentiating the statevector. Columns are gates. Intended for small n;
// cost is one full simulation per gate.
Eigen::MatrixXd exact_char_gradient(const IqpCircuit& c);

}  // namespace qcbm
