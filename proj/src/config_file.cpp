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

#include "qcbm/config_file.hpp"

#include <fstream>
#include <sstream>

#include "qcbm/errors.hpp"

namespace qcbm {

namespace {
std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}
}  // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_text(text.str(), path);
}

ConfigFile ConfigFile::parse_text(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    Entry e;
    e.key = trim(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    e.line = line_no;
    if (e.key.empty())
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    if (cfg.find(e.key))
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" + e.key + "'");
    cfg.entries_.push_back(std::move(e));
  }
  return cfg;
}

ConfigFile::Entry* ConfigFile::find(const std::string& key) {
  for (Entry& e : entries_)
    if (e.key == key) return &e;
  return nullptr;
}

const ConfigFile::Entry* ConfigFile::find(const std::string& key) const {
  for (const Entry& e : entries_)
    if (e.key == key) return &e;
  return nullptr;
}

bool ConfigFile::has(const std::string& key) const { return find(key) != nullptr; }

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) {
  Entry* e = find(key);
  if (!e) return fallback;
  e->consumed = true;
  return e->value;
}

double ConfigFile::get_double(const std::string& key, double fallback) {
  Entry* e = find(key);
  if (!e) return fallback;
  e->consumed = true;
  try {
    std::size_t used = 0;
    const double v = std::stod(e->value, &used);
    if (used != e->value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(origin_ + ":" + std::to_string(e->line) + ": bad number for '" + key + "'");
  }
}

std::int64_t ConfigFile::get_int(const std::string& key, std::int64_t fallback) {
  Entry* e = find(key);
  if (!e) return fallback;
  e->consumed = true;
  try {
    std::size_t used = 0;
    const std::int64_t v = std::stoll(e->value, &used);
    if (used != e->value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(origin_ + ":" + std::to_string(e->line) + ": bad integer for '" + key + "'");
  }
}

std::vector<std::uint64_t> ConfigFile::get_u64_list(const std::string& key,
                                                    std::vector<std::uint64_t> fallback) {
  Entry* e = find(key);
  if (!e) return fallback;
  e->consumed = true;
  std::vector<std::uint64_t> out;
  std::istringstream in(e->value);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw ConfigError(origin_ + ":" + std::to_string(e->line) + ": bad list entry '" + item + "'");
    }
  }
  if (out.empty())
    throw ConfigError(origin_ + ":" + std::to_string(e->line) + ": empty list for '" + key + "'");
  return out;
}

void ConfigFile::reject_unknown_keys() const {
  for (const Entry& e : entries_)
    if (!e.consumed)
      throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": unknown key '" + e.key + "'");
}

TrainConfig train_config_from_file(const std::string& path) {
  ConfigFile cfg = ConfigFile::parse_file(path);
  TrainConfig tc;
  tc.dataset_path = cfg.get_string("dataset", "");
  if (tc.dataset_path.empty()) throw ConfigError(path + ": missing required key 'dataset'");
  tc.exact_dist_path = cfg.get_string("exact_dist", "");
  tc.n = static_cast<int>(cfg.get_int("n", 0));
  tc.m = static_cast<int>(cfg.get_int("m", 0));
  tc.max_weight = static_cast<int>(cfg.get_int("max_weight", 6));

  const std::string measure = cfg.get_string("measure", "gaussian");
  if (measure == "gaussian") tc.mode = MeasureMode::FixedGaussian;
  else if (measure == "adaptive-gaussian") tc.mode = MeasureMode::AdaptiveGaussianInit;
  else if (measure == "adaptive-warm") tc.mode = MeasureMode::AdaptiveWarm;
  else throw ConfigError(path + ": measure must be gaussian, adaptive-gaussian, or adaptive-warm");

  tc.sigma = cfg.get_double("sigma", 0.0);
  tc.warm_strength = cfg.get_double("warm_k", 10.0);
  tc.iterations = cfg.get_int("iterations", 1000);
  tc.freq_batch = cfg.get_int("freq_batch", 1000);
  tc.shots = cfg.get_int("shots", 1000);
  tc.eval_every = cfg.get_int("eval_every", 100);
  tc.eval_batch = cfg.get_int("eval_batch", 1000);
  tc.gen_lr = cfg.get_double("gen_lr", 1e-3);
  tc.kernel_lr_base = cfg.get_double("kernel_lr", 1e-4);
  tc.kernel_lr_decay = cfg.get_double("kernel_lr_decay", 0.9);
  tc.kernel_lr_every = cfg.get_int("kernel_lr_every", 500);
  tc.beta1 = cfg.get_double("beta1", 0.9);
  tc.beta2 = cfg.get_double("beta2", 0.999);
  tc.eps_adam = cfg.get_double("eps_adam", 1e-8);
  tc.seeds = cfg.get_u64_list("seeds", {1, 2, 3, 4, 5});

  const std::string init = cfg.get_string("init", "covariance");
  if (init == "covariance") tc.init = GeneratorInit::MomentMatch;
  else if (init == "random") tc.init = GeneratorInit::RandomSmall;
  else throw ConfigError(path + ": init must be covariance or random");
  tc.init_scale = cfg.get_double("init_scale", 0.01);

  cfg.reject_unknown_keys();
  tc.validate();
  return tc;
}

}  // namespace qcbm
