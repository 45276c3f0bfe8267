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
#include <utility>
#include <vector>

#include "qcbm/iqp_circuit.hpp"
#include "qcbm/prob_vector.hpp"

namespace qcbm {

// A distribution supported on at most three outcomes (two after refinement).
struct SparseComponent {
  std::vector<int> support;
  std::vector<double> weights;
};

// N x N allocation: every row sums to 1/N, column j sums to p_j, and rows
// carry at most three nonzero entries. Rows, scaled by N, are the 3-sparse
// mixture components of p.
struct AllocationMatrix {
  Eigen::MatrixXd q;
};

// Entries at or below this magnitude count as structural zeros.
inline constexpr double kSparsityZero = 1e-12;

// Greedy capacity-filling decomposition of p into N 3-sparse components
// mixed uniformly: sort ascending, seed the diagonal with the below-average
// entries, then spread each remaining entry across the first rows with
// capacity left. The sort permutation is undone in the returned columns.
AllocationMatrix decompose_3sparse(const Eigen::VectorXd& p);

// Rows of the allocation as normalized sparse components.
std::vector<SparseComponent> components_from_allocation(const AllocationMatrix& a);

// Splits a (at most) 3-sparse component into two 2-sparse halves whose
// uniform mixture reproduces it exactly; 2-sparse inputs are duplicated.
std::pair<SparseComponent, SparseComponent> split_3sparse(const SparseComponent& q);

// p as a uniform mixture of exactly 2N 2-sparse components.
std::vector<SparseComponent> decompose_2sparse(const Eigen::VectorXd& p);

// Diagonal phases {theta_y} whose uniform-magnitude state puts probability
// `weight` on X-basis string s1 and the rest on s2. Built from a single
// rotated qubit at the first differing position, extended by a phase-
// controlled sign flip; every amplitude keeps magnitude 2^{-n/2}.
Eigen::VectorXd phases_for_2sparse(int n, const BitString& s1, const BitString& s2, double weight);

// Exact realization of an arbitrary n-bit distribution with n+1 hidden
// qubits: one 2-sparse component per hidden index. Capped at n <= 8.
IqpCircuit build_universal_circuit(const ProbVector& p);

// Approximate realization with only {0, pi} phases: each hidden index votes
// for one outcome, with counts from rounding p to the 2^-m grid (largest
// remainders rounded up). The marginal equals the grid distribution exactly,
// so tvd(p, result) <= 2^(n-1-m).
IqpCircuit build_grid_circuit(const ProbVector& p, int m_hidden);

// Exact realization of any 2-bit distribution with a single hidden qubit,
// via the tetrahedron coordinates (x, y, z) of the distribution and a
// two-branch product parameterization.
IqpCircuit solve_two_bit_hidden(const ProbVector& p);

// Output distribution of the 2-qubit, 0-hidden model at the given angles:
// the reachable set the hidden-qubit solver strictly extends.
Eigen::Vector4d two_qubit_iqp_dist(double theta1, double theta2, double theta3);

// Minimum TVD to `target` over a uniform steps^3 grid of angles for the
// 0-hidden 2-qubit model; stays bounded away from zero for support-3
// targets.
double two_qubit_grid_tvd_floor(const ProbVector& target, int steps_per_axis);

}  // namespace qcbm
