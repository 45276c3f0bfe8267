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

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qcbm/config_file.hpp"
#include "qcbm/datasets.hpp"
#include "qcbm/errors.hpp"
#include "qcbm/iqp_exact.hpp"
#include "qcbm/mmd.hpp"
#include "qcbm/rng.hpp"
#include "qcbm/train.hpp"
#include "qcbm/universality.hpp"
#include "qcbm/version.hpp"

namespace fs = std::filesystem;
using namespace qcbm;

namespace {

std::string g15(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

// The manifest records the exact invocation before any computation; running
// the same command line again reproduces every output byte for byte.
void write_manifest(const std::string& out_dir, const std::string& command_line,
                    const std::string& config_path, std::uint64_t seed) {
  fs::create_directories(out_dir);
  std::ofstream out(out_dir + "/manifest.txt");
  if (!out) throw std::runtime_error("cannot write manifest in " + out_dir);
  out << "#qcbm-manifest v1\n";
  out << "version = " << kVersion << "\n";
  out << "command = " << command_line << "\n";
  out << "config = " << (config_path.empty() ? "-" : config_path) << "\n";
  out << "seed = " << seed << "\n";
  out << "out = " << out_dir << "\n";
}

struct GenDataArgs {
  int n = 12;
  std::string kind = "parity";
  std::int64_t train_count = 2000;
  std::int64_t test_count = 50000;
  std::uint64_t seed = 1;
  std::string out;
};

void run_gen_data(const GenDataArgs& a) {
  if (a.kind == "parity") {
    const ParityCheck h = builtin_parity(a.n);
    write_parity(a.out + "/H.txt", h);
    write_dataset(a.out + "/train.txt", parity_sample(h, a.train_count, derive_stream(a.seed, 1)));
    write_dataset(a.out + "/test.txt", parity_sample(h, a.test_count, derive_stream(a.seed, 2)));
    if (a.n <= 16) write_prob_vector(a.out + "/truth.txt", parity_exact_dist(h));
    std::cout << "wrote parity dataset (n=" << a.n << ", " << a.train_count << " train / "
              << a.test_count << " test) to " << a.out << "\n";
  } else if (a.kind == "worstcase") {
    if (a.n < 12 || a.n > 16)
      throw ConfigError("gen-data: worstcase distribution files need 12 <= n <= 16");
    const auto [p, q] = worst_case_pair(a.n, a.seed);
    write_prob_vector(a.out + "/p.txt", p);
    write_prob_vector(a.out + "/q.txt", q);
    std::cout << "wrote worst-case pair (n=" << a.n << ", tvd=" << g15(tvd(p, q)) << ") to "
              << a.out << "\n";
  } else {
    throw ConfigError("gen-data: kind must be parity or worstcase");
  }
}

struct TrainArgs {
  std::string config;
  std::string out;
  std::int64_t seed_override = -1;
  int threads = 0;
  bool resume = false;
};

void write_aggregate_csv(const std::string& path, const std::vector<TrainLog>& logs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "iter,mmd_mean,mmd_std,exact_tvd_mean,exact_tvd_std,empirical_tvd_mean,empirical_tvd_std\n";
  if (logs.empty()) return;
  const std::size_t rows = logs.front().rows.size();
  for (const TrainLog& l : logs)
    if (l.rows.size() != rows) throw std::runtime_error("aggregate: seed logs differ in length");

  auto stats = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var = v.size() > 1 ? var / static_cast<double>(v.size() - 1) : 0.0;
    return std::pair<double, double>(mean, std::sqrt(var));
  };

  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<double> mmd, exact, emp;
    for (const TrainLog& l : logs) {
      mmd.push_back(l.rows[r].mmd);
      if (l.rows[r].exact_tvd) exact.push_back(*l.rows[r].exact_tvd);
      if (l.rows[r].empirical_tvd) emp.push_back(*l.rows[r].empirical_tvd);
    }
    const auto [mmd_mean, mmd_std] = stats(mmd);
    out << logs.front().rows[r].iter << "," << g15(mmd_mean) << "," << g15(mmd_std) << ",";
    if (exact.size() == logs.size()) {
      const auto [m, s] = stats(exact);
      out << g15(m) << "," << g15(s);
    } else {
      out << ",";
    }
    out << ",";
    if (emp.size() == logs.size()) {
      const auto [m, s] = stats(emp);
      out << g15(m) << "," << g15(s);
    } else {
      out << ",";
    }
    out << "\n";
  }
}

void run_train(const TrainArgs& a) {
  TrainConfig cfg = train_config_from_file(a.config);
  cfg.threads = a.threads;
  cfg.resume = a.resume;
  if (a.seed_override >= 0) cfg.seeds = {static_cast<std::uint64_t>(a.seed_override)};

  const Dataset data = read_dataset(cfg.dataset_path);
  std::optional<ProbVector> target;
  if (!cfg.exact_dist_path.empty()) target = read_prob_vector(cfg.exact_dist_path);

  std::vector<TrainLog> logs;
  for (std::uint64_t seed : cfg.seeds) {
    TrainConfig per_seed = cfg;
    per_seed.out_dir = a.out + "/seed_" + std::to_string(seed);
    const TrainResult res = train(per_seed, data, target, seed);
    // The per-seed log.csv is written incrementally by train(); collect the
    // full log (including any resumed prefix) for the aggregate.
    logs.push_back(read_train_log_csv(per_seed.out_dir + "/log.csv"));
    std::cout << "seed " << seed << ": final mmd=" << g15(res.log.rows.back().mmd);
    if (res.log.rows.back().exact_tvd)
      std::cout << " exact_tvd=" << g15(*res.log.rows.back().exact_tvd);
    std::cout << "\n";
  }
  write_aggregate_csv(a.out + "/aggregate.csv", logs);
}

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  std::string out;
  std::uint64_t seed = 0;
  std::int64_t freq_batch = 1000;
  std::int64_t shots = 1000;
  std::int64_t batch = 1000;
  int threads = 0;
};

bool is_dist_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);
  return line.rfind("#dist", 0) == 0;
}

void run_eval(const EvalArgs& a) {
  const IqpCircuit circuit = read_circuit(a.checkpoint);
  const int n = circuit.n_visible();

  std::optional<ProbVector> target_dist;
  std::optional<Dataset> target_data;
  if (is_dist_file(a.data)) target_dist = read_prob_vector(a.data);
  else target_data = read_dataset(a.data);
  const int data_n = target_dist ? target_dist->bit_width() : target_data->n;
  if (data_n != n) throw ConfigError("eval: checkpoint and data widths differ");

  std::ofstream out(a.out + "/metrics.csv");
  if (!out) throw std::runtime_error("cannot write metrics.csv");
  out << "metric,value\n";

  std::optional<ProbVector> model;
  if (n <= 16) model = exact_visible_distribution(circuit);

  if (model) {
    const ProbVector reference = target_dist ? *target_dist : empirical_dist(*target_data);
    out << "exact_tvd," << g15(tvd(*model, reference)) << "\n";
    SplitMix64 rng(derive_stream(a.seed, 0x4556414cULL));
    const Dataset batch = sample_dataset(*model, a.batch, rng);
    out << "empirical_tvd," << g15(tvd(empirical_dist(batch), reference)) << "\n";
  } else {
    out << "exact_tvd,\nempirical_tvd,\n";
  }

  if (circuit.is_generator_mode()) {
    const DataTerm term = target_dist ? DataTerm(*target_dist) : DataTerm(*target_data);
    const MmdEstimate est = mmd_estimate(term, circuit, GaussianMeasure(n, 0.0), a.freq_batch,
                                         a.shots, a.seed, a.threads);
    out << "mmd_gaussian0," << g15(est.value) << "\n";
  } else {
    out << "mmd_gaussian0,\n";
  }
  std::cout << "metrics written to " << a.out << "/metrics.csv\n";
}

struct UniversalityArgs {
  std::string target;
  std::string mode = "exact";
  int m = 8;
  std::string out;
};

void run_universality(const UniversalityArgs& a) {
  const ProbVector target = read_prob_vector(a.target);
  const int n = target.bit_width();

  IqpCircuit circuit = [&] {
    if (a.mode == "exact") return build_universal_circuit(target);
    if (a.mode == "grid") return build_grid_circuit(target, a.m);
    if (a.mode == "twobit") return solve_two_bit_hidden(target);
    throw ConfigError("universality: mode must be exact, grid, or twobit");
  }();

  const double achieved = tvd(exact_visible_distribution(circuit), target);
  const double bound = a.mode == "grid" ? std::exp2(n - 1 - a.m) : 1e-9;
  write_circuit(a.out + "/circuit.txt", circuit);
  std::ofstream report(a.out + "/report.txt");
  report << "mode = " << a.mode << "\n";
  report << "n = " << n << "\n";
  report << "m_hidden = " << circuit.m_hidden() << "\n";
  report << "achieved_tvd = " << g15(achieved) << "\n";
  report << "bound = " << g15(bound) << "\n";
  report << "within_bound = " << (achieved <= bound ? "yes" : "no") << "\n";
  std::cout << "mode " << a.mode << ": tvd " << g15(achieved) << " (bound " << g15(bound) << ")\n";
  if (achieved > bound) throw NumericError("universality: bound violated");
}

struct AdversarialArgs {
  int n = 10;
  std::uint64_t seed = 1;
  double sigma = 1.0;
  double eps = 1e-3;
  std::string out;
};

void run_adversarial(const AdversarialArgs& a) {
  std::ostringstream report;
  const KernelProbe probe = kernel_sensitivity_instance(a.n);
  const ProbVector model = exact_visible_distribution(probe.circuit);
  const GaussianMeasure gauss(a.n, a.sigma);
  const PointMassMeasure point(a.n, unit_bit(a.n, 1), a.eps);
  const double p_sigma = gauss.bit_probability();
  const double decay = std::pow(1.0 - p_sigma, a.n - 1);

  report << "kernel sensitivity instance: n=" << a.n << " sigma=" << g15(a.sigma)
         << " eps=" << g15(a.eps) << "\n";
  report << "metric,computed,closed_form\n";
  report << "tvd," << g15(tvd(probe.target, model)) << "," << g15(std::sqrt(2.0) / 4.0) << "\n";
  report << "mmd2_gaussian," << g15(mmd_exact(probe.target, model, gauss)) << ","
         << g15(0.5 * p_sigma * decay) << "\n";
  report << "mmd2_pointmass," << g15(mmd_exact(probe.target, model, point)) << ","
         << g15(0.5 * (1.0 - a.eps)) << "\n";
  report << "grad_norm_gaussian,"
         << g15(mmd_exact_grad_theta(probe.target, probe.circuit, gauss).norm()) << ","
         << g15(2.0 * p_sigma * decay) << "\n";
  report << "grad_norm_pointmass,"
         << g15(mmd_exact_grad_theta(probe.target, probe.circuit, point).norm()) << ","
         << g15(2.0 * (1.0 - a.eps)) << "\n";

  if (a.n >= 12 && a.n <= kMaxMmdEnumBits) {
    const auto [p, q] = worst_case_pair(a.n, a.seed);
    const CharSpectrum sp = walsh_char(p);
    const CharSpectrum sq = walsh_char(q);
    double max_char = 0.0, sup_gap = 0.0;
    for (Eigen::Index al = 1; al < sp.phi.size(); ++al) {
      max_char = std::max(max_char, std::abs(sp.phi[al]));
      const double d = sp.phi[al] - sq.phi[al];
      sup_gap = std::max(sup_gap, d * d);
    }
    report << "\nworst-case pair: n=" << a.n << "\n";
    report << "tvd = " << g15(tvd(p, q)) << "\n";
    report << "max_char_p = " << g15(max_char) << " (threshold " << g15(std::exp2(-0.25 * a.n))
           << ")\n";
    report << "sup_gap_sq = " << g15(sup_gap) << "\n";
    SplitMix64 rng(derive_stream(a.seed, 0xF5ULL));
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(a.n, a.n);
    Eigen::VectorXd b(a.n);
    for (int i = 0; i < a.n; ++i) {
      b[i] = rng.next_double() - 0.5;
      for (int r = 0; r < i; ++r) w(i, r) = rng.next_double() - 0.5;
    }
    const Fvsbn critic(a.n, std::move(w), std::move(b));
    report << "mmd2_gaussian = " << g15(mmd_exact(p, q, gauss)) << "\n";
    report << "mmd2_pointmass = " << g15(mmd_exact(p, q, point)) << "\n";
    report << "mmd2_fvsbn = " << g15(mmd_exact(p, q, critic)) << "\n";
    report << "ceiling_holds = "
           << ((mmd_exact(p, q, gauss) <= sup_gap && mmd_exact(p, q, point) <= sup_gap &&
                mmd_exact(p, q, critic) <= sup_gap)
                   ? "yes"
                   : "no")
           << "\n";
  } else {
    report << "\nworst-case pair: skipped (needs 12 <= n <= " << kMaxMmdEnumBits << ")\n";
  }

  std::cout << report.str();
  std::ofstream out(a.out + "/report.txt");
  out << report.str();
}

}  // namespace

int main(int argc, char** argv) {
  std::string command_line;
  for (int i = 0; i < argc; ++i) {
    if (i) command_line += ' ';
    command_line += argv[i];
  }

  CLI::App app{"IQP Born machine toolkit: datasets, spectral MMD training, universality checks"};
  app.require_subcommand(1);

  GenDataArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-data", "generate benchmark datasets");
  gen_cmd->add_option("--n", gen.n, "bit width");
  gen_cmd->add_option("--kind", gen.kind, "parity | worstcase");
  gen_cmd->add_option("--train-count", gen.train_count, "training rows");
  gen_cmd->add_option("--test-count", gen.test_count, "test rows");
  gen_cmd->add_option("--seed", gen.seed, "master seed");
  gen_cmd->add_option("--out", gen.out, "output directory")->required();

  TrainArgs tr;
  CLI::App* train_cmd = app.add_subcommand("train", "run adversarial or fixed-kernel training");
  train_cmd->add_option("--config", tr.config, "key = value config file")->required();
  train_cmd->add_option("--out", tr.out, "output directory")->required();
  train_cmd->add_option("--seed", tr.seed_override, "override the config seed list with one seed");
  train_cmd->add_option("--threads", tr.threads, "worker cap (0 = hardware)");
  train_cmd->add_flag("--resume", tr.resume, "continue from saved per-seed state");

  EvalArgs ev;
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a circuit checkpoint");
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "circuit checkpoint")->required();
  eval_cmd->add_option("--data", ev.data, "dataset or distribution file")->required();
  eval_cmd->add_option("--out", ev.out, "output directory")->required();
  eval_cmd->add_option("--seed", ev.seed, "seed for sampling metrics");
  eval_cmd->add_option("--freq-batch", ev.freq_batch, "MMD frequency batch");
  eval_cmd->add_option("--shots", ev.shots, "MMD shots per frequency");
  eval_cmd->add_option("--batch", ev.batch, "generated batch size");
  eval_cmd->add_option("--threads", ev.threads, "worker cap (0 = hardware)");

  UniversalityArgs un;
  CLI::App* uni_cmd = app.add_subcommand("universality", "build and verify constructions");
  uni_cmd->add_option("--target", un.target, "target distribution file")->required();
  uni_cmd->add_option("--mode", un.mode, "exact | grid | twobit");
  uni_cmd->add_option("--m", un.m, "hidden qubits (grid mode)");
  uni_cmd->add_option("--out", un.out, "output directory")->required();

  AdversarialArgs ad;
  CLI::App* adv_cmd = app.add_subcommand("adversarial-check", "closed-form and worst-case tables");
  adv_cmd->add_option("--n", ad.n, "bit width");
  adv_cmd->add_option("--seed", ad.seed, "seed for the worst-case pair");
  adv_cmd->add_option("--sigma", ad.sigma, "Gaussian bandwidth");
  adv_cmd->add_option("--eps", ad.eps, "point-mass leak");
  adv_cmd->add_option("--out", ad.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen_cmd->parsed()) {
      write_manifest(gen.out, command_line, "", gen.seed);
      run_gen_data(gen);
    } else if (train_cmd->parsed()) {
      write_manifest(tr.out, command_line, tr.config,
                     tr.seed_override >= 0 ? static_cast<std::uint64_t>(tr.seed_override) : 0);
      run_train(tr);
    } else if (eval_cmd->parsed()) {
      write_manifest(ev.out, command_line, "", ev.seed);
      run_eval(ev);
    } else if (uni_cmd->parsed()) {
      write_manifest(un.out, command_line, "", 0);
      run_universality(un);
    } else if (adv_cmd->parsed()) {
      write_manifest(ad.out, command_line, "", ad.seed);
      run_adversarial(ad);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SizeCapError& e) {
    std::cerr << "size cap: " << e.what() << "\n";
    return 4;
  } catch (const NumericError& e) {
    std::cerr << "numeric abort: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
