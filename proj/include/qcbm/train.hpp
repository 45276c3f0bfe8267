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
#include <optional>
#include <string>
#include <vector>

#include "qcbm/dataset.hpp"
#include "qcbm/fvsbn.hpp"
#include "qcbm/iqp_circuit.hpp"
#include "qcbm/mmd.hpp"
#include "qcbm/prob_vector.hpp"

namespace qcbm {

// Which spectral measure drives training. The fixed Gaussian baseline is
// carried as a frozen FVSBN critic initialized at the Gaussian measure, so
// the frequency-sampling path is shared: an adaptive run whose kernel
// learning rate is zero is bit-identical to the fixed baseline.
enum class MeasureMode { FixedGaussian, AdaptiveGaussianInit, AdaptiveWarm };

enum class GeneratorInit { MomentMatch, RandomSmall };

struct TrainConfig {
  std::string dataset_path;
  std::string exact_dist_path;  // optional ground truth for exact TVD evals

  int n = 0;  // visible qubits; 0 means take the dataset width
  int m = 0;  // hidden qubits
  int max_weight = 6;

  MeasureMode mode = MeasureMode::FixedGaussian;
  double sigma = 0.0;
  double warm_strength = 10.0;

  std::int64_t iterations = 1000;
  std::int64_t freq_batch = 1000;
  std::int64_t shots = 1000;
  std::int64_t eval_every = 100;
  std::int64_t eval_batch = 1000;

  double gen_lr = 1e-3;
  double kernel_lr_base = 1e-4;
  double kernel_lr_decay = 0.9;
  std::int64_t kernel_lr_every = 500;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_adam = 1e-8;

  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};

  GeneratorInit init = GeneratorInit::MomentMatch;
  double init_scale = 0.01;

  int threads = 0;          // 0 = hardware concurrency
  std::string out_dir;      // per-seed checkpoint/log directory; "" disables
  bool resume = false;      // continue from out_dir's saved state

  void validate() const;
};

struct TrainLogRow {
  std::int64_t iter = 0;
  double mmd = 0.0;
  std::optional<double> exact_tvd;
  std::optional<double> empirical_tvd;
  double kernel_lr = 0.0;
  std::int64_t wall_ms = 0;
};

struct TrainLog {
  std::vector<TrainLogRow> rows;
};

struct TrainResult {
  IqpCircuit circuit;
  Fvsbn critic;
  TrainLog log;
};

// All generator masks of weight 1..max_weight over the m+n qubits, in
// ascending mask order, with zero angles.
std::vector<GeneratorGate> all_gates_up_to_weight(int total_qubits, int max_weight);

// Covariance-style initialization: single-qubit angles on visible qubits
// match the data's one-bit expectations exactly (theta = acos(<Z_j>)/2);
// everything else starts at zero. RandomSmall draws every angle uniformly
// from (-scale, scale) instead.
IqpCircuit init_generator(const Dataset& data, int n, int m, int max_weight,
                          GeneratorInit kind = GeneratorInit::MomentMatch, double scale = 0.01,
                          std::uint64_t seed = 0);

// One adversarial training run: per iteration a shared K-frequency batch
// yields the loss estimate and both gradients against the pre-step
// parameters; the generator descends, then (in adaptive modes) the critic
// ascends with the decayed kernel rate. Deterministic given (config, seed):
// all randomness derives from (seed, iteration), which also makes a resumed
// run reproduce the uninterrupted one.
TrainResult train(const TrainConfig& cfg, const Dataset& data,
                  const std::optional<ProbVector>& exact_target, std::uint64_t seed);

// Convenience overload loading the dataset and optional ground truth from
// the paths in the config.
TrainResult train(const TrainConfig& cfg, std::uint64_t seed);

// CSV with header "iter,mmd,exact_tvd,empirical_tvd,kernel_lr,wall_ms";
// absent evals are empty fields.
void append_train_log_csv(const std::string& path, const TrainLog& log);
TrainLog read_train_log_csv(const std::string& path);

}  // namespace qcbm
