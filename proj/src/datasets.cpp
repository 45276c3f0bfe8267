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

#include "qcbm/datasets.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "qcbm/errors.hpp"
#include "qcbm/rng.hpp"

namespace qcbm {

namespace {

void check_parity(const ParityCheck& h) {
  if (h.n < 1 || h.n > kMaxDenseBits)
    throw std::invalid_argument("parity check: width must be in [1, 24]");
  for (std::uint64_t row : h.rows)
    if (row >> h.n) throw std::invalid_argument("parity check: row wider than n");
}

bool satisfies(const ParityCheck& h, std::uint64_t x) {
  for (std::uint64_t row : h.rows)
    if (parity_dot(row, x)) return false;
  return true;
}

// Row echelon over GF(2); returns pivot bit positions (0 = most significant)
// and leaves reduced rows in `reduced`.
int echelon(const ParityCheck& h, std::vector<std::uint64_t>& reduced, std::vector<int>& pivots) {
  reduced = h.rows;
  pivots.clear();
  int rank = 0;
  for (int col = 0; col < h.n && rank < static_cast<int>(reduced.size()); ++col) {
    const std::uint64_t mask = std::uint64_t{1} << (h.n - 1 - col);
    int found = -1;
    for (int r = rank; r < static_cast<int>(reduced.size()); ++r)
      if (reduced[static_cast<std::size_t>(r)] & mask) {
        found = r;
        break;
      }
    if (found < 0) continue;
    std::swap(reduced[static_cast<std::size_t>(rank)], reduced[static_cast<std::size_t>(found)]);
    for (int r = 0; r < static_cast<int>(reduced.size()); ++r)
      if (r != rank && (reduced[static_cast<std::size_t>(r)] & mask))
        reduced[static_cast<std::size_t>(r)] ^= reduced[static_cast<std::size_t>(rank)];
    pivots.push_back(col);
    ++rank;
  }
  return rank;
}

std::vector<std::uint64_t> null_space_basis(const ParityCheck& h) {
  std::vector<std::uint64_t> reduced;
  std::vector<int> pivots;
  const int rank = echelon(h, reduced, pivots);
  std::vector<bool> is_pivot(static_cast<std::size_t>(h.n), false);
  for (int c : pivots) is_pivot[static_cast<std::size_t>(c)] = true;

  std::vector<std::uint64_t> basis;
  for (int free_col = 0; free_col < h.n; ++free_col) {
    if (is_pivot[static_cast<std::size_t>(free_col)]) continue;
    const std::uint64_t free_mask = std::uint64_t{1} << (h.n - 1 - free_col);
    std::uint64_t v = free_mask;
    for (int r = 0; r < rank; ++r)
      if (reduced[static_cast<std::size_t>(r)] & free_mask)
        v |= std::uint64_t{1} << (h.n - 1 - pivots[static_cast<std::size_t>(r)]);
    basis.push_back(v);
  }
  return basis;
}

}  // namespace

int gf2_rank(const ParityCheck& h) {
  check_parity(h);
  std::vector<std::uint64_t> reduced;
  std::vector<int> pivots;
  return echelon(h, reduced, pivots);
}

ProbVector parity_exact_dist(const ParityCheck& h) {
  check_parity(h);
  const Eigen::Index size = Eigen::Index{1} << h.n;
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(size);
  Eigen::Index support = 0;
  for (Eigen::Index x = 0; x < size; ++x)
    if (satisfies(h, static_cast<std::uint64_t>(x))) {
      mass[x] = 1.0;
      ++support;
    }
  mass /= static_cast<double>(support);
  return ProbVector(h.n, std::move(mass));
}

Dataset parity_sample(const ParityCheck& h, std::int64_t count, std::uint64_t seed) {
  check_parity(h);
  if (count < 1) throw std::invalid_argument("parity_sample: count must be >= 1");
  Dataset d;
  d.n = h.n;
  d.rows.reserve(static_cast<std::size_t>(count));
  SplitMix64 rng(derive_stream(seed, 0x50415249ULL));
  if (gf2_rank(h) <= 8) {
    while (static_cast<std::int64_t>(d.rows.size()) < count) {
      const std::uint64_t x = rng.next_bits(h.n);
      if (satisfies(h, x)) d.rows.push_back(x);
    }
  } else {
    const std::vector<std::uint64_t> basis = null_space_basis(h);
    for (std::int64_t s = 0; s < count; ++s) {
      std::uint64_t x = 0;
      for (std::uint64_t b : basis)
        if (rng.next_bernoulli(0.5)) x ^= b;
      d.rows.push_back(x);
    }
  }
  return d;
}

ParityCheck builtin_parity(int n) {
  // Leading block of ones and trailing block of ones; block lengths keep the
  // two rows and their XOR all above weight n/2.
  int w_head, w_tail;
  switch (n) {
    case 12: w_head = 8; w_tail = 8; break;
    case 14: w_head = 8; w_tail = 9; break;
    case 16: w_head = 9; w_tail = 10; break;
    default: throw std::invalid_argument("builtin_parity: supported widths are 12, 14, 16");
  }
  ParityCheck h;
  h.n = n;
  h.rows.push_back(((std::uint64_t{1} << w_head) - 1) << (n - w_head));
  h.rows.push_back((std::uint64_t{1} << w_tail) - 1);
  return h;
}

void write_parity(const std::string& path, const ParityCheck& h) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_parity: cannot open " + path);
  out << "#n=" << h.n << "\n";
  for (std::uint64_t row : h.rows) out << to_string(BitString(row, h.n)) << "\n";
}

ParityCheck read_parity(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_parity: cannot open " + path);
  ParityCheck h;
  std::string line;
  bool width_known = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("#n=", 0) == 0) {
        h.n = std::stoi(line.substr(3));
        width_known = true;
      }
      continue;
    }
    const BitString row = bitstring_from_string(line);
    if (!width_known) {
      h.n = row.width;
      width_known = true;
    }
    if (row.width != h.n) throw std::runtime_error("read_parity: inconsistent row width");
    h.rows.push_back(row.bits);
  }
  if (!width_known) throw std::runtime_error("read_parity: empty file " + path);
  return h;
}

std::pair<ProbVector, ProbVector> worst_case_pair(int n, std::uint64_t seed) {
  if (n < 12 || n > kMaxDenseBits)
    throw std::invalid_argument("worst_case_pair: n must be in [12, 24]");
  const Eigen::Index size = Eigen::Index{1} << n;
  const auto subset = static_cast<Eigen::Index>((std::uint64_t{1} << n) / 3);
  const double threshold = std::exp2(-0.25 * n);

  std::vector<std::uint32_t> order(static_cast<std::size_t>(size));
  for (int attempt = 0; attempt < 100; ++attempt) {
    SplitMix64 rng(derive_stream(seed, static_cast<std::uint64_t>(attempt)));
    std::iota(order.begin(), order.end(), 0u);
    for (Eigen::Index i = 0; i < subset; ++i) {
      const auto j = i + static_cast<Eigen::Index>(
                             rng.next_below(static_cast<std::uint64_t>(size - i)));
      std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    Eigen::VectorXd mass_p = Eigen::VectorXd::Zero(size);
    for (Eigen::Index i = 0; i < subset; ++i)
      mass_p[static_cast<Eigen::Index>(order[static_cast<std::size_t>(i)])] =
          1.0 / static_cast<double>(subset);
    ProbVector p(n, std::move(mass_p));
    const CharSpectrum sp = walsh_char(p);
    double worst = 0.0;
    for (Eigen::Index a = 1; a < size; ++a) worst = std::max(worst, std::abs(sp.phi[a]));
    if (worst > threshold) continue;

    Eigen::VectorXd mass_q(size);
    const double fill = 1.0 / static_cast<double>(size - subset);
    for (Eigen::Index x = 0; x < size; ++x) mass_q[x] = p.mass()[x] > 0.0 ? 0.0 : fill;
    return {std::move(p), ProbVector(n, std::move(mass_q))};
  }
  throw NumericError("worst_case_pair: spectrum concentration not reached in 100 draws");
}

KernelProbe kernel_sensitivity_instance(int n) {
  if (n < 1) throw std::invalid_argument("kernel_sensitivity_instance: bad width");
  std::vector<GeneratorGate> gates;
  gates.reserve(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j)
    gates.push_back({unit_bit(n, j), j == 1 ? std::numbers::pi / 8.0 : std::numbers::pi / 4.0});
  return {ProbVector::uniform(n), IqpCircuit::from_generators(n, 0, std::move(gates))};
}

}  // namespace qcbm
