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
#include <cstdint>
#include <stdexcept>

namespace qcbm {

// Bias-corrected Adam. Moments start at zero; lr may be changed between
// steps (the kernel side decays it on a schedule).
struct AdamState {
  Eigen::VectorXd first_moment;
  Eigen::VectorXd second_moment;
  std::int64_t step_count = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_adam = 1e-8;

  AdamState(Eigen::Index size, double lr_, double beta1_ = 0.9, double beta2_ = 0.999,
            double eps_ = 1e-8)
      : first_moment(Eigen::VectorXd::Zero(size)),
        second_moment(Eigen::VectorXd::Zero(size)),
        lr(lr_),
        beta1(beta1_),
        beta2(beta2_),
        eps_adam(eps_) {}
};

inline void adam_step(AdamState& s, Eigen::Ref<Eigen::VectorXd> params,
                      const Eigen::VectorXd& grads) {
  if (params.size() != s.first_moment.size() || grads.size() != s.first_moment.size())
    throw std::invalid_argument("adam_step: shape mismatch");
  ++s.step_count;
  s.first_moment = s.beta1 * s.first_moment + (1.0 - s.beta1) * grads;
  s.second_moment = s.beta2 * s.second_moment + (1.0 - s.beta2) * grads.cwiseAbs2();
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step_count));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step_count));
  const Eigen::ArrayXd m_hat = s.first_moment.array() / c1;
  const Eigen::ArrayXd v_hat = s.second_moment.array() / c2;
  params.array() -= s.lr * m_hat / (v_hat.sqrt() + s.eps_adam);
}

// Kernel learning-rate schedule: base rate decayed by 10% every 500 steps.
inline double kernel_lr(std::int64_t iter, double base = 1e-4, double decay = 0.9,
                        std::int64_t every = 500) {
  return base * std::pow(decay, static_cast<double>(iter / every));
}

}  // namespace qcbm
