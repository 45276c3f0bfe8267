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

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qcbm/dataset.hpp"
#include "qcbm/iqp_circuit.hpp"
#include "qcbm/prob_vector.hpp"

namespace qcbm {

// A binary parity-check matrix: K rows of width n. The benchmark target is
// the uniform distribution over its GF(2) null space.
struct ParityCheck {
  int n = 0;
  std::vector<std::uint64_t> rows;
};

int gf2_rank(const ParityCheck& h);

// Uniform distribution over {x : Hx = 0 mod 2}; support size 2^(n - rank).
ProbVector parity_exact_dist(const ParityCheck& h);

// Seeded sampler for null-space rows: rejection sampling while the
// acceptance rate is decent (rank <= 8), a null-space-basis sampler
// otherwise. Every returned row satisfies all checks.
Dataset parity_sample(const ParityCheck& h, std::int64_t count, std::uint64_t seed);

// Built-in two-row matrices of overlapping one-blocks for n in {12, 14, 16}:
// both rows and their XOR have Hamming weight above n/2, which pushes all
// non-trivial spectrum to high weights.
ParityCheck builtin_parity(int n);

void write_parity(const std::string& path, const ParityCheck& h);
ParityCheck read_parity(const std::string& path);

// A pair of disjoint-support distributions (TVD exactly 1) whose
// characteristic functions are uniformly tiny away from zero: p uniform on
// a random third of the cube, q uniform on the complement. Resamples until
// max_{alpha != 0} |phi_p| <= 2^(-n/4); needs 12 <= n <= 24.
std::pair<ProbVector, ProbVector> worst_case_pair(int n, std::uint64_t seed);

// Uniform target plus the single-qubit circuit at angles (pi/8, pi/4, ...):
// the two differ at exactly one weight-1 frequency, so a spectral measure
// concentrated there sees a constant gap while a product measure's view
// shrinks exponentially with n.
struct KernelProbe {
  ProbVector target;
  IqpCircuit circuit;
};
KernelProbe kernel_sensitivity_instance(int n);

}  // namespace qcbm
