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

#include "qcbm/iqp_estimator.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qcbm/rng.hpp"
#include "qcbm/walsh.hpp"

namespace qcbm {

namespace {

// Widest visible register for which the per-y phase table (2^n doubles) is
// built with a Walsh butterfly instead of per-sample popcount loops.
constexpr int kTableBackendMaxBits = 16;

struct ActiveGate {
  std::uint64_t visible = 0;
  std::uint64_t hidden = 0;
  double angle = 0.0;
  Eigen::Index gate_index = 0;
};

// The estimator runs a couple of million times per training run; per-thread
// scratch keeps the hot path free of heap traffic.
struct Workspace {
  std::vector<ActiveGate> act;
  std::vector<std::uint64_t> ys, zs;
  Eigen::VectorXd per_z;
  Eigen::VectorXd table;
  Eigen::VectorXd grad_table;
};

Workspace& workspace() {
  thread_local Workspace ws;
  return ws;
}

// Gates whose visible mask has odd overlap with alpha; only these enter the
// phase difference. All other gates contribute neither value nor gradient.
void collect_active_gates(const IqpCircuit& c, const BitString& alpha,
                          std::vector<ActiveGate>& act) {
  const std::uint64_t visible_mask = (std::uint64_t{1} << c.n_visible()) - 1;
  act.clear();
  const auto& gs = c.gates();
  for (std::size_t j = 0; j < gs.size(); ++j) {
    const std::uint64_t vis = gs[j].mask.bits & visible_mask;
    if (parity_dot(vis, alpha.bits)) {
      act.push_back({vis, gs[j].mask.bits >> c.n_visible(), gs[j].angle,
                     static_cast<Eigen::Index>(j)});
    }
  }
}

struct SampleSpec {
  bool y_exhaustive = false;
  bool z_exhaustive = false;
};

SampleSpec draw_samples(const IqpCircuit& c, std::int64_t samples_y, std::int64_t samples_z,
                        std::uint64_t seed, bool z_exhaustive, Workspace& ws) {
  const int m = c.m_hidden();
  const int n = c.n_visible();
  if (samples_y < 1 || samples_z < 1)
    throw std::invalid_argument("mc_z estimator: sample counts must be >= 1");

  SampleSpec spec;
  const bool y_fits = m < 62 && samples_y >= (std::int64_t{1} << m);
  if (y_fits) {
    spec.y_exhaustive = true;
    ws.ys.resize(std::size_t{1} << m);
    for (std::size_t k = 0; k < ws.ys.size(); ++k) ws.ys[k] = k;
  } else {
    SplitMix64 rng(derive_stream(seed, 0));
    ws.ys.resize(static_cast<std::size_t>(samples_y));
    for (auto& y : ws.ys) y = rng.next_bits(m);
  }
  if (z_exhaustive) {
    spec.z_exhaustive = true;
    ws.zs.resize(std::size_t{1} << n);
    for (std::size_t z = 0; z < ws.zs.size(); ++z) ws.zs[z] = z;
  } else {
    SplitMix64 rng(derive_stream(seed, 1));
    ws.zs.resize(static_cast<std::size_t>(samples_z));
    for (auto& z : ws.zs) z = rng.next_bits(n);
  }
  return spec;
}

struct CoreResult {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

// Cross-product average of cos(phase difference) over the drawn samples.
// When grad_acc is set, grad_scale times the per-gate derivative of the
// average is added into it (touching only the active gates).
CoreResult evaluate(const IqpCircuit& c, const BitString& alpha, const SampleSpec& spec,
                    double grad_scale, Eigen::VectorXd* grad_acc, Workspace& ws) {
  if (!c.is_generator_mode())
    throw std::invalid_argument("mc_z estimator: requires a generator-mode circuit");
  if (alpha.width != c.n_visible())
    throw std::invalid_argument("mc_z estimator: alpha width must equal n_visible");
  if (grad_acc && grad_acc->size() != static_cast<Eigen::Index>(c.gates().size()))
    throw std::invalid_argument("mc_z estimator: gradient accumulator size mismatch");

  const int n = c.n_visible();
  collect_active_gates(c, alpha, ws.act);
  const std::int64_t ny = static_cast<std::int64_t>(ws.ys.size());
  const std::int64_t nz = static_cast<std::int64_t>(ws.zs.size());

  CoreResult out;
  out.samples = ny * nz;
  if (ws.act.empty()) {
    out.value = 1.0;  // phase difference vanishes for every sample
    return out;
  }

  const bool table = n <= kTableBackendMaxBits &&
                     (Eigen::Index{1} << n) * (n + 1) <
                         static_cast<Eigen::Index>(nz) * static_cast<Eigen::Index>(ws.act.size());
  const double pair_weight = 1.0 / (static_cast<double>(ny) * static_cast<double>(nz));
  const bool want_gradient = grad_acc != nullptr;

  // per_z carries the sum over y of each sampled z's value; pair_sq the sum
  // of squared per-pair values. Together they feed the std-error estimate.
  ws.per_z.resize(static_cast<Eigen::Index>(nz));
  ws.per_z.setZero();
  double pair_sq = 0.0;

  for (std::int64_t yi = 0; yi < ny; ++yi) {
    const std::uint64_t y = ws.ys[static_cast<std::size_t>(yi)];
    if (table) {
      const Eigen::Index size = Eigen::Index{1} << n;
      ws.table.resize(size);
      ws.table.setZero();
      for (const ActiveGate& g : ws.act) {
        const double sign = parity_dot(g.hidden, y) ? -1.0 : 1.0;
        ws.table[static_cast<Eigen::Index>(g.visible)] += sign * g.angle;
      }
      walsh_hadamard_inplace<double>(ws.table);
      if (want_gradient) {
        ws.grad_table.resize(size);
        ws.grad_table.setZero();
      }
      for (std::int64_t zi = 0; zi < nz; ++zi) {
        const auto z = static_cast<Eigen::Index>(ws.zs[static_cast<std::size_t>(zi)]);
        const double arg = 2.0 * ws.table[z];
        const double v = std::cos(arg);
        ws.per_z[static_cast<Eigen::Index>(zi)] += v;
        pair_sq += v * v;
        if (want_gradient) ws.grad_table[z] += -2.0 * std::sin(arg) * pair_weight;
      }
      if (want_gradient) {
        walsh_hadamard_inplace<double>(ws.grad_table);
        for (const ActiveGate& g : ws.act) {
          const double sign = parity_dot(g.hidden, y) ? -1.0 : 1.0;
          (*grad_acc)[g.gate_index] +=
              grad_scale * sign * ws.grad_table[static_cast<Eigen::Index>(g.visible)];
        }
      }
    } else {
      for (std::int64_t zi = 0; zi < nz; ++zi) {
        const std::uint64_t z = ws.zs[static_cast<std::size_t>(zi)];
        double arg = 0.0;
        for (const ActiveGate& g : ws.act) {
          const bool flip = (parity_dot(g.hidden, y) ^ parity_dot(g.visible, z)) != 0;
          arg += flip ? -g.angle : g.angle;
        }
        arg *= 2.0;
        const double v = std::cos(arg);
        ws.per_z[static_cast<Eigen::Index>(zi)] += v;
        pair_sq += v * v;
        if (want_gradient) {
          const double d = grad_scale * -2.0 * std::sin(arg) * pair_weight;
          for (const ActiveGate& g : ws.act) {
            const bool flip = (parity_dot(g.hidden, y) ^ parity_dot(g.visible, z)) != 0;
            (*grad_acc)[g.gate_index] += flip ? -d : d;
          }
        }
      }
    }
  }

  ws.per_z /= static_cast<double>(ny);
  out.value = ws.per_z.sum() / static_cast<double>(nz);

  if (spec.y_exhaustive && spec.z_exhaustive) {
    out.std_error = 0.0;  // deterministic average over the whole grid
  } else if (spec.y_exhaustive) {
    // y is averaged out exactly; the per-z means are the iid sample.
    if (nz > 1) {
      const double var =
          (ws.per_z.array() - out.value).square().sum() / static_cast<double>(nz - 1);
      out.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(nz));
    }
  } else if (out.samples > 1) {
    // Sample standard deviation over all |Y| x |Z| pair values.
    const double count = static_cast<double>(out.samples);
    const double var = (pair_sq - count * out.value * out.value) / (count - 1.0);
    out.std_error = std::sqrt(std::max(var, 0.0) / count);
  }
  return out;
}

}  // namespace

ZEval mc_z_eval(const IqpCircuit& c, const BitString& alpha, std::int64_t samples_y,
                std::int64_t samples_z, std::uint64_t seed, bool want_gradient) {
  Workspace& ws = workspace();
  const SampleSpec spec = draw_samples(c, samples_y, samples_z, seed, false, ws);
  ZEval out;
  if (want_gradient) {
    out.grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c.gates().size()));
    const CoreResult r = evaluate(c, alpha, spec, 1.0, &out.grad, ws);
    out.value = r.value;
    out.std_error = r.std_error;
    out.samples = r.samples;
  } else {
    const CoreResult r = evaluate(c, alpha, spec, 0.0, nullptr, ws);
    out.value = r.value;
    out.std_error = r.std_error;
    out.samples = r.samples;
  }
  return out;
}

double mc_z_eval_accumulate(const IqpCircuit& c, const BitString& alpha, std::int64_t samples_y,
                            std::int64_t samples_z, std::uint64_t seed, double grad_scale,
                            Eigen::VectorXd& grad_acc) {
  Workspace& ws = workspace();
  const SampleSpec spec = draw_samples(c, samples_y, samples_z, seed, false, ws);
  return evaluate(c, alpha, spec, grad_scale, &grad_acc, ws).value;
}

ZEstimate mc_z_expectation(const IqpCircuit& c, const BitString& alpha, std::int64_t samples_y,
                           std::int64_t samples_z, std::uint64_t seed) {
  const ZEval e = mc_z_eval(c, alpha, samples_y, samples_z, seed, false);
  return {e.value, e.std_error, e.samples};
}

Eigen::VectorXd mc_z_gradient(const IqpCircuit& c, const BitString& alpha, std::int64_t samples_y,
                              std::int64_t samples_z, std::uint64_t seed) {
  return mc_z_eval(c, alpha, samples_y, samples_z, seed, true).grad;
}

double mc_z_expectation_exhaustive(const IqpCircuit& c, const BitString& alpha) {
  Workspace& ws = workspace();
  const SampleSpec spec =
      draw_samples(c, std::int64_t{1} << c.m_hidden(), 1, 0, /*z_exhaustive=*/true, ws);
  return evaluate(c, alpha, spec, 0.0, nullptr, ws).value;
}

Eigen::VectorXd mc_z_gradient_exhaustive(const IqpCircuit& c, const BitString& alpha) {
  Workspace& ws = workspace();
  const SampleSpec spec =
      draw_samples(c, std::int64_t{1} << c.m_hidden(), 1, 0, /*z_exhaustive=*/true, ws);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c.gates().size()));
  evaluate(c, alpha, spec, 1.0, &grad, ws);
  return grad;
}

YzSplit default_yz_split(std::int64_t shots, int m_hidden) {
  if (shots < 1) throw std::invalid_argument("default_yz_split: shots must be >= 1");
  const auto root = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(shots))));
  std::int64_t y = std::max<std::int64_t>(root, 1);
  if (m_hidden < 62) y = std::min(y, std::int64_t{1} << m_hidden);
  const std::int64_t z = (shots + y - 1) / y;
  return {y, z};
}

}  // namespace qcbm
