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

#include "qcbm/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "qcbm/rng.hpp"

namespace qcbm {

double data_z_expectation(const Dataset& d, const BitString& alpha) {
  if (d.rows.empty()) throw std::invalid_argument("data_z_expectation: empty dataset");
  if (alpha.width != d.n) throw std::invalid_argument("data_z_expectation: width mismatch");
  std::int64_t acc = 0;
  for (std::uint64_t x : d.rows) acc += parity_dot(alpha.bits, x) ? -1 : 1;
  return static_cast<double>(acc) / static_cast<double>(d.rows.size());
}

ProbVector empirical_dist(const Dataset& d) {
  if (d.rows.empty()) throw std::invalid_argument("empirical_dist: empty dataset");
  Eigen::VectorXd m = Eigen::VectorXd::Zero(Eigen::Index{1} << d.n);
  const double w = 1.0 / static_cast<double>(d.rows.size());
  for (std::uint64_t x : d.rows) m[static_cast<Eigen::Index>(x)] += w;
  return ProbVector(d.n, std::move(m));
}

void write_dataset(const std::string& path, const Dataset& d) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_dataset: cannot open " + path);
  out << "#n=" << d.n << "\n";
  for (std::uint64_t x : d.rows) out << to_string(BitString(x, d.n)) << "\n";
  if (!out) throw std::runtime_error("write_dataset: write failed for " + path);
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_dataset: cannot open " + path);
  Dataset d;
  std::string line;
  bool width_known = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("#n=", 0) == 0) {
        d.n = std::stoi(line.substr(3));
        width_known = true;
      }
      continue;
    }
    const BitString row = bitstring_from_string(line);
    if (!width_known) {
      d.n = row.width;
      width_known = true;
    }
    if (row.width != d.n) throw std::runtime_error("read_dataset: inconsistent row width in " + path);
    d.rows.push_back(row.bits);
  }
  if (d.rows.empty()) throw std::runtime_error("read_dataset: no rows in " + path);
  return d;
}

Dataset sample_dataset(const ProbVector& p, std::int64_t count, SplitMix64& rng) {
  if (count < 1) throw std::invalid_argument("sample_dataset: count must be >= 1");
  std::vector<double> cum(static_cast<std::size_t>(p.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    acc += p.mass()[i];
    cum[static_cast<std::size_t>(i)] = acc;
  }
  Dataset d;
  d.n = p.bit_width();
  d.rows.reserve(static_cast<std::size_t>(count));
  for (std::int64_t s = 0; s < count; ++s) {
    const double u = rng.next_double() * acc;
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    const auto idx = static_cast<std::uint64_t>(
        std::min<std::ptrdiff_t>(it - cum.begin(), static_cast<std::ptrdiff_t>(cum.size()) - 1));
    d.rows.push_back(idx);
  }
  return d;
}

}  // namespace qcbm
