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
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "qcbm/iqp_circuit.hpp"
#include "qcbm/prob_vector.hpp"
#include "qcbm/rng.hpp"

namespace qcbm::test {

// Uniform draw from the probability simplex via normalized exponentials.
inline ProbVector random_prob_vector(int n, SplitMix64& rng) {
  Eigen::VectorXd v(Eigen::Index{1} << n);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = -std::log(1.0 - rng.next_double());
  v /= v.sum();
  return ProbVector(n, std::move(v));
}

inline Eigen::VectorXd random_simplex(Eigen::Index count, SplitMix64& rng) {
  Eigen::VectorXd v(count);
  for (Eigen::Index i = 0; i < count; ++i) v[i] = -std::log(1.0 - rng.next_double());
  return v / v.sum();
}

// Random generator-mode circuit: distinct nonzero masks, uniform angles.
inline IqpCircuit random_circuit(int n_visible, int m_hidden, int gate_count, SplitMix64& rng) {
  const int total = n_visible + m_hidden;
  std::vector<GeneratorGate> gates;
  std::vector<bool> used(std::size_t{1} << total, false);
  while (static_cast<int>(gates.size()) < gate_count) {
    const std::uint64_t mask = rng.next_below((std::uint64_t{1} << total) - 1) + 1;
    if (used[static_cast<std::size_t>(mask)]) continue;
    used[static_cast<std::size_t>(mask)] = true;
    gates.push_back({BitString(mask, total), rng.next_double() * 6.283185307179586});
  }
  return IqpCircuit::from_generators(n_visible, m_hidden, std::move(gates));
}

// Scratch directory for file-format tests; recreated per call.
inline std::string fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("qcbm_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

// chi-square 0.999 quantiles for the uniformity checks below.
inline constexpr double kChi2Crit255 = 330.519744;  // df = 255
inline constexpr double kChi2Crit63 = 103.442377;   // df = 63

}  // namespace qcbm::test
