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

#include "qcbm/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qcbm/adam.hpp"
#include "qcbm/errors.hpp"
#include "qcbm/iqp_exact.hpp"
#include "qcbm/rng.hpp"

namespace qcbm {

namespace {

namespace fs = std::filesystem;

// Stream tag for model-batch sampling at evals, outside the 0..K-1 range
// the frequency batch uses.
constexpr std::uint64_t kEvalStreamTag = 0xFFFFFFFF00000001ULL;

constexpr int kExactEvalMaxBits = 16;

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp);
    out << content;
    if (!out) throw std::runtime_error("atomic_write: write failed for " + tmp);
  }
  fs::rename(tmp, path);
}

std::string format_g17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct TrainState {
  std::int64_t next_iter = 0;
  Eigen::VectorXd theta;
  Eigen::VectorXd gamma;
  AdamState adam_theta{0, 0.0};
  AdamState adam_gamma{0, 0.0};
};

void save_state(const std::string& path, const TrainState& s) {
  std::ostringstream out;
  out << "#train-state v1\n";
  out << "next_iter " << s.next_iter << "\n";
  auto dump_vec = [&out](const char* name, const Eigen::VectorXd& v) {
    out << name << " " << v.size() << "\n";
    for (Eigen::Index i = 0; i < v.size(); ++i) out << format_g17(v[i]) << "\n";
  };
  dump_vec("theta", s.theta);
  dump_vec("gamma", s.gamma);
  out << "adam_theta_t " << s.adam_theta.step_count << "\n";
  dump_vec("adam_theta_m", s.adam_theta.first_moment);
  dump_vec("adam_theta_v", s.adam_theta.second_moment);
  out << "adam_gamma_t " << s.adam_gamma.step_count << "\n";
  dump_vec("adam_gamma_m", s.adam_gamma.first_moment);
  dump_vec("adam_gamma_v", s.adam_gamma.second_moment);
  atomic_write(path, out.str());
}

bool load_state(const std::string& path, TrainState& s) {
  std::ifstream in(path);
  if (!in) return false;
  std::string line;
  if (!std::getline(in, line) || line != "#train-state v1")
    throw std::runtime_error("train state: bad header in " + path);
  auto read_vec = [&](const char* name) {
    std::string tag;
    Eigen::Index count;
    if (!(in >> tag >> count) || tag != name)
      throw std::runtime_error("train state: expected section " + std::string(name));
    Eigen::VectorXd v(count);
    for (Eigen::Index i = 0; i < count; ++i)
      if (!(in >> v[i])) throw std::runtime_error("train state: truncated section " + std::string(name));
    return v;
  };
  std::string tag;
  if (!(in >> tag >> s.next_iter) || tag != "next_iter")
    throw std::runtime_error("train state: missing next_iter in " + path);
  s.theta = read_vec("theta");
  s.gamma = read_vec("gamma");
  if (!(in >> tag >> s.adam_theta.step_count) || tag != "adam_theta_t")
    throw std::runtime_error("train state: missing adam_theta_t");
  s.adam_theta.first_moment = read_vec("adam_theta_m");
  s.adam_theta.second_moment = read_vec("adam_theta_v");
  if (!(in >> tag >> s.adam_gamma.step_count) || tag != "adam_gamma_t")
    throw std::runtime_error("train state: missing adam_gamma_t");
  s.adam_gamma.first_moment = read_vec("adam_gamma_m");
  s.adam_gamma.second_moment = read_vec("adam_gamma_v");
  return true;
}

std::string csv_row(const TrainLogRow& r) {
  std::ostringstream out;
  out << r.iter << "," << format_g17(r.mmd) << ",";
  if (r.exact_tvd) out << format_g17(*r.exact_tvd);
  out << ",";
  if (r.empirical_tvd) out << format_g17(*r.empirical_tvd);
  out << "," << format_g17(r.kernel_lr) << "," << r.wall_ms << "\n";
  return out.str();
}

}  // namespace

void TrainConfig::validate() const {
  if (iterations < 1 || freq_batch < 2 || shots < 2 || eval_every < 1 || eval_batch < 1)
    throw ConfigError("train config: iteration/batch settings must be positive (freq_batch, shots >= 2)");
  if (gen_lr < 0 || kernel_lr_base < 0 || kernel_lr_decay <= 0 || kernel_lr_every < 1)
    throw ConfigError("train config: invalid learning-rate settings");
  if (max_weight < 1) throw ConfigError("train config: max_weight must be >= 1");
  if (m < 0 || n < 0) throw ConfigError("train config: negative qubit count");
  if (seeds.empty()) throw ConfigError("train config: need at least one seed");
}

std::vector<GeneratorGate> all_gates_up_to_weight(int total_qubits, int max_weight) {
  if (total_qubits < 1 || total_qubits > 30)
    throw std::invalid_argument("all_gates_up_to_weight: bad qubit count");
  std::vector<GeneratorGate> gates;
  const std::uint64_t limit = std::uint64_t{1} << total_qubits;
  for (std::uint64_t mask = 1; mask < limit; ++mask)
    if (std::popcount(mask) <= max_weight) gates.push_back({BitString(mask, total_qubits), 0.0});
  return gates;
}

IqpCircuit init_generator(const Dataset& data, int n, int m, int max_weight, GeneratorInit kind,
                          double scale, std::uint64_t seed) {
  if (data.n != n) throw std::invalid_argument("init_generator: dataset width must equal n");
  std::vector<GeneratorGate> gates = all_gates_up_to_weight(n + m, max_weight);
  if (kind == GeneratorInit::RandomSmall) {
    SplitMix64 rng(derive_stream(seed, 0x494e4954ULL));
    for (GeneratorGate& g : gates) g.angle = scale * (2.0 * rng.next_double() - 1.0);
  } else {
    const std::uint64_t visible_mask = (std::uint64_t{1} << n) - 1;
    for (GeneratorGate& g : gates) {
      const std::uint64_t vis = g.mask.bits & visible_mask;
      if ((g.mask.bits >> n) == 0 && std::popcount(vis) == 1) {
        const double z = data_z_expectation(data, BitString(vis, n));
        g.angle = 0.5 * std::acos(std::clamp(z, -1.0 + 1e-9, 1.0 - 1e-9));
      }
    }
  }
  return IqpCircuit::from_generators(n, m, std::move(gates));
}

TrainResult train(const TrainConfig& cfg, const Dataset& data,
                  const std::optional<ProbVector>& exact_target, std::uint64_t seed) {
  cfg.validate();
  const int n = cfg.n == 0 ? data.n : cfg.n;
  if (data.n != n) throw ConfigError("train: dataset width does not match configured n");
  if (exact_target && exact_target->bit_width() != n)
    throw ConfigError("train: ground-truth width does not match n");

  IqpCircuit circuit = init_generator(data, n, cfg.m, cfg.max_weight, cfg.init, cfg.init_scale, seed);
  Fvsbn critic = cfg.mode == MeasureMode::AdaptiveWarm
                     ? fvsbn_init_warm(n, cfg.warm_strength)
                     : fvsbn_init_gaussian(n, cfg.sigma);
  const bool adaptive = cfg.mode != MeasureMode::FixedGaussian;

  TrainState st;
  st.theta = circuit.angles();
  st.gamma = critic.pack_parameters();
  st.adam_theta = AdamState(st.theta.size(), cfg.gen_lr, cfg.beta1, cfg.beta2, cfg.eps_adam);
  st.adam_gamma = AdamState(st.gamma.size(), cfg.kernel_lr_base, cfg.beta1, cfg.beta2, cfg.eps_adam);

  const bool persist = !cfg.out_dir.empty();
  std::string state_path, csv_path;
  if (persist) {
    fs::create_directories(cfg.out_dir);
    state_path = cfg.out_dir + "/state.txt";
    csv_path = cfg.out_dir + "/log.csv";
    if (cfg.resume && load_state(state_path, st)) {
      circuit.set_angles(st.theta);
      critic.unpack_parameters(st.gamma);
    } else if (!cfg.resume) {
      std::error_code ec;  // fresh run, fresh outputs
      fs::remove(csv_path, ec);
      fs::remove(state_path, ec);
    }
  }

  std::int64_t last_logged_iter = -1;
  if (persist && cfg.resume && fs::exists(csv_path)) {
    const TrainLog prior = read_train_log_csv(csv_path);
    if (!prior.rows.empty()) last_logged_iter = prior.rows.back().iter;
  }

  const DataTerm data_term(data);
  const bool can_eval = n <= kExactEvalMaxBits;
  std::optional<ProbVector> train_empirical;
  if (can_eval) train_empirical = empirical_dist(data);

  TrainLog log;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed_ms = [&t0] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 t0)
        .count();
  };

  auto run_evals = [&](TrainLogRow& row) {
    if (!can_eval) return;
    const ProbVector model = exact_visible_distribution(circuit);
    if (exact_target) row.exact_tvd = tvd(model, *exact_target);
    SplitMix64 rng(derive_stream(derive_stream(seed, static_cast<std::uint64_t>(row.iter)),
                                 kEvalStreamTag));
    const Dataset batch = sample_dataset(model, cfg.eval_batch, rng);
    row.empirical_tvd = tvd(empirical_dist(batch), *train_empirical);
  };

  auto persist_checkpoints = [&] {
    if (!persist) return;
    write_circuit(cfg.out_dir + "/circuit.txt.tmp", circuit);
    fs::rename(cfg.out_dir + "/circuit.txt.tmp", cfg.out_dir + "/circuit.txt");
    write_fvsbn(cfg.out_dir + "/critic.txt.tmp", critic);
    fs::rename(cfg.out_dir + "/critic.txt.tmp", cfg.out_dir + "/critic.txt");
    save_state(state_path, st);
  };

  std::ofstream csv;
  if (persist) {
    const bool fresh = !fs::exists(csv_path);
    csv.open(csv_path, std::ios::app);
    if (!csv) throw std::runtime_error("train: cannot open " + csv_path);
    if (fresh) csv << "iter,mmd,exact_tvd,empirical_tvd,kernel_lr,wall_ms\n";
  }
  auto emit = [&](const TrainLogRow& row) {
    log.rows.push_back(row);
    last_logged_iter = row.iter;
    if (persist) {
      csv << csv_row(row);
      csv.flush();
    }
  };

  for (std::int64_t iter = st.next_iter; iter < cfg.iterations; ++iter) {
    const std::uint64_t iter_key = derive_stream(seed, static_cast<std::uint64_t>(iter));
    const MmdBatch batch = mmd_batch(data_term, circuit, critic, adaptive ? &critic : nullptr,
                                     cfg.freq_batch, cfg.shots, iter_key, cfg.threads, true);
    if (!std::isfinite(batch.estimate.value) || !batch.grad_theta.allFinite() ||
        (adaptive && !batch.grad_gamma.allFinite()))
      throw NumericError("train: non-finite loss or gradient at iteration " + std::to_string(iter));

    TrainLogRow row;
    row.iter = iter;
    row.mmd = batch.estimate.value;
    row.kernel_lr = adaptive
                        ? kernel_lr(iter, cfg.kernel_lr_base, cfg.kernel_lr_decay, cfg.kernel_lr_every)
                        : 0.0;
    if (iter % cfg.eval_every == 0) run_evals(row);

    adam_step(st.adam_theta, st.theta, batch.grad_theta);
    circuit.set_angles(st.theta);
    if (adaptive) {
      st.adam_gamma.lr = row.kernel_lr;
      adam_step(st.adam_gamma, st.gamma, -batch.grad_gamma);  // critic ascends
      critic.unpack_parameters(st.gamma);
    }
    st.next_iter = iter + 1;

    row.wall_ms = elapsed_ms();
    emit(row);
    if ((iter + 1) % cfg.eval_every == 0 || iter + 1 == cfg.iterations) persist_checkpoints();
  }

  // Final row: the post-training state, evaluated on a fresh batch.
  if (st.next_iter == cfg.iterations && last_logged_iter != cfg.iterations) {
    const std::uint64_t iter_key = derive_stream(seed, static_cast<std::uint64_t>(cfg.iterations));
    const MmdBatch batch = mmd_batch(data_term, circuit, critic, nullptr, cfg.freq_batch, cfg.shots,
                                     iter_key, cfg.threads, false);
    TrainLogRow row;
    row.iter = cfg.iterations;
    row.mmd = batch.estimate.value;
    row.kernel_lr = 0.0;
    run_evals(row);
    row.wall_ms = elapsed_ms();
    emit(row);
    persist_checkpoints();
  }

  return {std::move(circuit), std::move(critic), std::move(log)};
}

TrainResult train(const TrainConfig& cfg, std::uint64_t seed) {
  const Dataset data = read_dataset(cfg.dataset_path);
  std::optional<ProbVector> target;
  if (!cfg.exact_dist_path.empty()) target = read_prob_vector(cfg.exact_dist_path);
  return train(cfg, data, target, seed);
}

void append_train_log_csv(const std::string& path, const TrainLog& log) {
  const bool fresh = !fs::exists(path);
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("append_train_log_csv: cannot open " + path);
  if (fresh) out << "iter,mmd,exact_tvd,empirical_tvd,kernel_lr,wall_ms\n";
  for (const TrainLogRow& r : log.rows) out << csv_row(r);
}

TrainLog read_train_log_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_train_log_csv: cannot open " + path);
  TrainLog log;
  std::string line;
  if (!std::getline(in, line)) return log;  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    TrainLogRow r;
    std::getline(ls, field, ',');
    r.iter = std::stoll(field);
    std::getline(ls, field, ',');
    r.mmd = std::stod(field);
    std::getline(ls, field, ',');
    if (!field.empty()) r.exact_tvd = std::stod(field);
    std::getline(ls, field, ',');
    if (!field.empty()) r.empirical_tvd = std::stod(field);
    std::getline(ls, field, ',');
    r.kernel_lr = std::stod(field);
    std::getline(ls, field, ',');
    r.wall_ms = std::stoll(field);
    log.rows.push_back(r);
  }
  return log;
}

}  // namespace qcbm
