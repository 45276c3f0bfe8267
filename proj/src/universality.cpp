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

#include "qcbm/universality.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "qcbm/errors.hpp"

namespace qcbm {

namespace {

constexpr double kPi = std::numbers::pi;

void check_prob_vector(const Eigen::VectorXd& p) {
  if (p.size() < 1) throw std::invalid_argument("decomposition: empty probability vector");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p[i] > -kSparsityZero))
      throw std::invalid_argument("decomposition: negative probability entry");
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("decomposition: probabilities must sum to 1");
}

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

}  // namespace

AllocationMatrix decompose_3sparse(const Eigen::VectorXd& p) {
  check_prob_vector(p);
  const Eigen::Index count = p.size();
  const double row_cap = 1.0 / static_cast<double>(count);

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(count));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  std::stable_sort(perm.begin(), perm.end(),
                   [&p](Eigen::Index a, Eigen::Index b) { return p[a] < p[b]; });

  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(count, count);
  if (count == 1) {
    q(0, 0) = 1.0;
    return {q};
  }

  // First below-average prefix goes on the diagonal; k is the first sorted
  // position at or above the row capacity (k >= 1, so a uniform vector
  // seeds exactly one diagonal entry).
  Eigen::Index k = count - 1;
  for (Eigen::Index i = 1; i < count; ++i) {
    if (p[perm[static_cast<std::size_t>(i)]] >= row_cap) {
      k = i;
      break;
    }
  }
  Eigen::VectorXd capacity = Eigen::VectorXd::Constant(count, row_cap);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double v = p[perm[static_cast<std::size_t>(i)]];
    q(i, i) = v;
    capacity[i] -= v;
  }

  for (Eigen::Index col = k; col < count; ++col) {
    double residual = p[perm[static_cast<std::size_t>(col)]];
    for (Eigen::Index row = 0; row < count && residual > 0.0; ++row) {
      const double take = std::min(capacity[row], residual);
      if (take <= 0.0) continue;
      q(row, col) += take;
      capacity[row] -= take;
      residual -= take;
    }
    if (residual > 1e-9)
      throw NumericError("decompose_3sparse: ran out of row capacity (input not normalized?)");
  }

  // Undo the sort: column `col` of the sorted problem is outcome perm[col].
  AllocationMatrix out{Eigen::MatrixXd::Zero(count, count)};
  for (Eigen::Index col = 0; col < count; ++col)
    out.q.col(perm[static_cast<std::size_t>(col)]) = q.col(col);
  return out;
}

std::vector<SparseComponent> components_from_allocation(const AllocationMatrix& a) {
  const Eigen::Index count = a.q.rows();
  std::vector<SparseComponent> comps;
  comps.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    SparseComponent c;
    double sum = 0.0;
    for (Eigen::Index j = 0; j < count; ++j) {
      if (a.q(i, j) > kSparsityZero) {
        c.support.push_back(static_cast<int>(j));
        c.weights.push_back(a.q(i, j));
        sum += a.q(i, j);
      }
    }
    for (double& w : c.weights) w /= sum;
    comps.push_back(std::move(c));
  }
  return comps;
}

std::pair<SparseComponent, SparseComponent> split_3sparse(const SparseComponent& q) {
  if (q.support.size() > 3) throw std::invalid_argument("split_3sparse: support larger than 3");
  if (q.support.size() <= 2) return {q, q};

  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&q](int a, int b) {
    return q.weights[static_cast<std::size_t>(a)] < q.weights[static_cast<std::size_t>(b)];
  });
  const int a = q.support[static_cast<std::size_t>(order[0])];
  const int b = q.support[static_cast<std::size_t>(order[1])];
  const int c = q.support[static_cast<std::size_t>(order[2])];
  const double pa = q.weights[static_cast<std::size_t>(order[0])];
  const double pb = q.weights[static_cast<std::size_t>(order[1])];
  SparseComponent q1{{a, c}, {2.0 * pa, 1.0 - 2.0 * pa}};
  SparseComponent q2{{b, c}, {2.0 * pb, 1.0 - 2.0 * pb}};
  return {std::move(q1), std::move(q2)};
}

std::vector<SparseComponent> decompose_2sparse(const Eigen::VectorXd& p) {
  const std::vector<SparseComponent> threes =
      components_from_allocation(decompose_3sparse(p));
  std::vector<SparseComponent> out;
  out.reserve(2 * threes.size());
  for (const SparseComponent& c : threes) {
    auto [q1, q2] = split_3sparse(c);
    out.push_back(std::move(q1));
    out.push_back(std::move(q2));
  }
  return out;
}

Eigen::VectorXd phases_for_2sparse(int n, const BitString& s1, const BitString& s2, double weight) {
  if (s1.width != n || s2.width != n)
    throw std::invalid_argument("phases_for_2sparse: width mismatch");
  if (!(weight >= 0.0 && weight <= 1.0))
    throw std::invalid_argument("phases_for_2sparse: weight outside [0,1]");
  const Eigen::Index size = Eigen::Index{1} << n;

  const bool endpoint = weight == 0.0 || weight == 1.0;
  if (s1.bits == s2.bits && !endpoint)
    throw std::invalid_argument("phases_for_2sparse: equal strings need weight 0 or 1");

  // Endpoints are a plain X-basis sign pattern; no rotation needed.
  if (endpoint) {
    const BitString& s = weight == 1.0 ? s1 : s2;
    Eigen::VectorXd phases(size);
    for (Eigen::Index y = 0; y < size; ++y)
      phases[y] = parity_dot(s.bits, static_cast<std::uint64_t>(y)) ? kPi : 0.0;
    return phases;
  }

  // Seed qubit: the first position where the strings differ. The rotated
  // qubit's plus arm keeps the string with a 0 there; the minus arm is
  // steered to the other one by the controlled flip below.
  int d = 1;
  while (s1.bit(d) == s2.bit(d)) ++d;
  const std::uint64_t d_mask = std::uint64_t{1} << (n - d);
  const bool s1_on_plus = s1.bit(d) == 0;
  const std::uint64_t plus_arm = s1_on_plus ? s1.bits : s2.bits;
  const double plus_weight = s1_on_plus ? weight : 1.0 - weight;
  const double theta = 2.0 * std::acos(std::sqrt(plus_weight));

  const std::uint64_t rest_plus = plus_arm & ~d_mask;
  const std::uint64_t flip = (s1.bits ^ s2.bits) & ~d_mask;

  Eigen::VectorXcd amp(size);
  const std::complex<double> rot(std::cos(theta), std::sin(theta));
  for (Eigen::Index y = 0; y < size; ++y) {
    const auto yy = static_cast<std::uint64_t>(y);
    std::complex<double> v = (yy & d_mask) ? rot : 1.0;
    if (parity_dot(rest_plus, yy)) v = -v;
    amp[y] = v;
  }
  // Controlled sign flip: where the remaining bits hit `flip` oddly, swap
  // the two amplitudes along the seed qubit. A permutation, so magnitudes
  // stay uniform.
  for (Eigen::Index y = 0; y < size; ++y) {
    const auto yy = static_cast<std::uint64_t>(y);
    if ((yy & d_mask) == 0 && parity_dot(flip, yy))
      std::swap(amp[y], amp[static_cast<Eigen::Index>(yy | d_mask)]);
  }

  Eigen::VectorXd phases(size);
  for (Eigen::Index y = 0; y < size; ++y) {
    if (std::abs(std::abs(amp[y]) - 1.0) > 1e-9)
      throw NumericError("phases_for_2sparse: lost magnitude uniformity");
    phases[y] = std::arg(amp[y]);
  }
  return phases;
}

IqpCircuit build_universal_circuit(const ProbVector& p) {
  const int n = p.bit_width();
  if (n > 8) throw SizeCapError("build_universal_circuit: capped at n <= 8");
  const int m = n + 1;
  const Eigen::Index block = Eigen::Index{1} << n;

  const std::vector<SparseComponent> comps = decompose_2sparse(p.mass());
  Eigen::VectorXd phases(Eigen::Index{1} << (n + m));
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const SparseComponent& c = comps[k];
    Eigen::VectorXd blk;
    if (c.support.size() == 1) {
      blk = phases_for_2sparse(n, BitString(static_cast<std::uint64_t>(c.support[0]), n),
                               BitString(static_cast<std::uint64_t>(c.support[0]), n), 1.0);
    } else {
      blk = phases_for_2sparse(n, BitString(static_cast<std::uint64_t>(c.support[0]), n),
                               BitString(static_cast<std::uint64_t>(c.support[1]), n), c.weights[0]);
    }
    phases.segment(static_cast<Eigen::Index>(k) * block, block) = blk;
  }
  return IqpCircuit::from_dense(n, m, std::move(phases));
}

IqpCircuit build_grid_circuit(const ProbVector& p, int m_hidden) {
  const int n = p.bit_width();
  if (m_hidden < 1) throw std::invalid_argument("build_grid_circuit: need at least one hidden qubit");
  if (n + m_hidden > kMaxDenseDiagonalBits)
    throw SizeCapError("build_grid_circuit: m+n exceeds the dense diagonal cap");
  const Eigen::Index count = p.size();
  const auto grid = std::int64_t{1} << m_hidden;

  std::vector<std::int64_t> counts(static_cast<std::size_t>(count));
  std::vector<double> remainder(static_cast<std::size_t>(count));
  std::int64_t assigned = 0;
  for (Eigen::Index j = 0; j < count; ++j) {
    const double scaled = static_cast<double>(grid) * p.mass()[j];
    const auto floor_val = static_cast<std::int64_t>(std::floor(scaled));
    counts[static_cast<std::size_t>(j)] = floor_val;
    remainder[static_cast<std::size_t>(j)] = scaled - static_cast<double>(floor_val);
    assigned += floor_val;
  }
  std::int64_t leftover = grid - assigned;
  // Largest remainders round up; ties resolve by outcome index.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&remainder](Eigen::Index a, Eigen::Index b) {
    return remainder[static_cast<std::size_t>(a)] > remainder[static_cast<std::size_t>(b)];
  });
  for (Eigen::Index idx = 0; leftover > 0 && idx < count; ++idx, --leftover)
    ++counts[static_cast<std::size_t>(order[static_cast<std::size_t>(idx)])];
  if (leftover != 0) throw NumericError("build_grid_circuit: rounding failed to conserve counts");

  const Eigen::Index block = Eigen::Index{1} << n;
  Eigen::VectorXd phases(Eigen::Index{1} << (n + m_hidden));
  Eigen::Index hidden = 0;
  for (Eigen::Index s = 0; s < count; ++s) {
    for (std::int64_t c = 0; c < counts[static_cast<std::size_t>(s)]; ++c, ++hidden) {
      for (Eigen::Index y = 0; y < block; ++y)
        phases[hidden * block + y] =
            parity_dot(static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(y)) ? kPi : 0.0;
    }
  }
  return IqpCircuit::from_dense(n, m_hidden, std::move(phases));
}

Eigen::Vector4d two_qubit_iqp_dist(double theta1, double theta2, double theta3) {
  const double x = 0.5 * (std::cos(theta1) + std::cos(theta2 - theta3));
  const double y = 0.5 * (std::cos(theta2) + std::cos(theta1 - theta3));
  const double z = 0.5 * (std::cos(theta3) + std::cos(theta1 - theta2));
  Eigen::Vector4d out;
  out[0] = 0.25 * (1.0 + x + y + z);
  out[1] = 0.25 * (1.0 + x - y - z);
  out[2] = 0.25 * (1.0 - x + y - z);
  out[3] = 0.25 * (1.0 - x - y + z);
  return out;
}

double two_qubit_grid_tvd_floor(const ProbVector& target, int steps_per_axis) {
  if (target.bit_width() != 2) throw std::invalid_argument("two_qubit_grid_tvd_floor: need 2 bits");
  if (steps_per_axis < 2) throw std::invalid_argument("two_qubit_grid_tvd_floor: need >= 2 steps");
  const Eigen::Vector4d t = target.mass();
  const double step = 2.0 * kPi / static_cast<double>(steps_per_axis);
  double best = 1.0;
  for (int i = 0; i < steps_per_axis; ++i)
    for (int j = 0; j < steps_per_axis; ++j)
      for (int k = 0; k < steps_per_axis; ++k) {
        const Eigen::Vector4d model =
            two_qubit_iqp_dist(step * i, step * j, step * k);
        const double d = 0.5 * (model - t).cwiseAbs().sum();
        if (d < best) best = d;
      }
  return best;
}

IqpCircuit solve_two_bit_hidden(const ProbVector& p) {
  if (p.bit_width() != 2) throw std::invalid_argument("solve_two_bit_hidden: need a 2-bit target");
  const Eigen::VectorXd& t = p.mass();
  const double x0 = t[0] + t[1] - t[2] - t[3];
  const double y0 = t[0] - t[1] + t[2] - t[3];
  const double z0 = t[0] - t[1] - t[2] + t[3];
  if (z0 < -1.0 + std::abs(x0 + y0) - 1e-9 || z0 > 1.0 - std::abs(x0 - y0) + 1e-9)
    throw NumericError("solve_two_bit_hidden: target outside the feasibility tetrahedron");

  const double f1 = x0 < 0.0 ? -1.0 : 1.0;
  const double f2 = y0 < 0.0 ? -1.0 : 1.0;
  double x = f1 * x0;
  double y = f2 * y0;
  double z = f1 * f2 * z0;
  const bool swapped = x < y;
  if (swapped) std::swap(x, y);

  // Two product-form branches (a, u, v) and (at, ut, vt) averaging to the
  // target coordinates.
  double a, u, v, at, ut, vt;
  if (x > 0.5) {
    at = (y - z) + std::sqrt((y - z) * (y - z) + (2.0 * x - 1.0));
    at = std::clamp(at, 2.0 * x - 1.0, 1.0);
    a = 1.0;
    u = 1.0;
    v = 2.0 * y - at;
    ut = (2.0 * x - 1.0) / at;
    vt = 1.0;
  } else {
    a = 1.0 - 2.0 * x;
    at = 1.0;
    u = -1.0;
    ut = 1.0;
    v = clamp_unit((y - z) / (1.0 - x));  // x <= 1/2 here
    vt = 2.0 * y - (1.0 - 2.0 * x) * v;
  }
  if (swapped) {
    std::swap(u, v);
    std::swap(ut, vt);
  }
  u = clamp_unit(f1 * u);
  ut = clamp_unit(f1 * ut);
  v = clamp_unit(f2 * v);
  vt = clamp_unit(f2 * vt);

  const double rx = 0.5 * (a * u + at * ut);
  const double ry = 0.5 * (a * v + at * vt);
  const double rz = 0.5 * (u * v + ut * vt);
  if (std::abs(rx - x0) > 1e-9 || std::abs(ry - y0) > 1e-9 || std::abs(rz - z0) > 1e-9)
    throw NumericError("solve_two_bit_hidden: branch solution failed to reproduce the target");

  Eigen::VectorXd phases(8);
  const double branch_a[2] = {a, at};
  const double branch_u[2] = {u, ut};
  const double branch_v[2] = {v, vt};
  for (int k = 0; k < 2; ++k) {
    const double delta = 2.0 * std::acos(std::clamp(branch_a[k], 0.0, 1.0));
    const double theta1 = std::acos(clamp_unit(branch_u[k])) - 0.5 * delta;
    const double theta2 = std::acos(clamp_unit(branch_v[k])) - 0.5 * delta;
    const double theta3 = theta1 + theta2 + delta;
    phases[4 * k + 0] = 0.0;
    phases[4 * k + 1] = theta2;
    phases[4 * k + 2] = theta1;
    phases[4 * k + 3] = theta3;
  }
  return IqpCircuit::from_dense(2, 1, std::move(phases));
}

}  // namespace qcbm
