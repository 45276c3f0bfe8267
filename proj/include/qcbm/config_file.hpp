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

#include <string>
#include <vector>

#include "qcbm/train.hpp"

namespace qcbm {

// Flat "key = value" text with '#' comments. Duplicate keys and unknown keys
// are hard errors reported with their line number.
class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_text(const std::string& text, const std::string& origin);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback);
  double get_double(const std::string& key, double fallback);
  std::int64_t get_int(const std::string& key, std::int64_t fallback);
  std::vector<std::uint64_t> get_u64_list(const std::string& key,
                                          std::vector<std::uint64_t> fallback);

  // Throws ConfigError naming the first key nobody consumed.
  void reject_unknown_keys() const;

 private:
  struct Entry {
    std::string key, value;
    int line = 0;
    bool consumed = false;
  };
  Entry* find(const std::string& key);
  const Entry* find(const std::string& key) const;

  std::string origin_;
  std::vector<Entry> entries_;
};

// Train configuration keys: dataset, exact_dist, n, m, max_weight, measure
// (gaussian | adaptive-gaussian | adaptive-warm), sigma, warm_k, iterations,
// freq_batch, shots, eval_every, eval_batch, gen_lr, kernel_lr,
// kernel_lr_decay, kernel_lr_every, beta1, beta2, eps_adam, seeds
// (comma-separated), init (covariance | random), init_scale.
TrainConfig train_config_from_file(const std::string& path);

}  // namespace qcbm
