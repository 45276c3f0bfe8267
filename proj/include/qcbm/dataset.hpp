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
#include <string>
#include <vector>

#include "qcbm/bitstring.hpp"
#include "qcbm/prob_vector.hpp"

namespace qcbm {

// An ordered list of n-bit samples. Rows are stored as integer codes under
// the shared most-significant-first convention.
struct Dataset {
  int n = 0;
  std::vector<std::uint64_t> rows;

  BitString row(std::size_t i) const { return BitString(rows[i], n); }
  std::size_t size() const { return rows.size(); }
};

// Mean over rows of (-1)^{alpha . x}; the empirical characteristic value.
double data_z_expectation(const Dataset& d, const BitString& alpha);

// Empirical distribution: mass[x] = count(x) / |rows|. Requires n within
// the dense cap and a non-empty dataset.
ProbVector empirical_dist(const Dataset& d);

// File format: one bitstring per line, ASCII '0'/'1', newline-terminated;
// first line optionally "#n=<width>".
void write_dataset(const std::string& path, const Dataset& d);
Dataset read_dataset(const std::string& path);

class SplitMix64;

// Draws `count` rows from an explicit distribution by inverse CDF.
Dataset sample_dataset(const ProbVector& p, std::int64_t count, SplitMix64& rng);

}  // namespace qcbm
