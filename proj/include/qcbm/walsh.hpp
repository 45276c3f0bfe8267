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
#include <stdexcept>

namespace qcbm {

// In-place Walsh-Hadamard butterfly: v'[k] = sum_x (-1)^{popcount(k & x)} v[x].
// Self-inverse up to the factor v.size(). Sequential evaluation order, so
// results are bit-reproducible across runs and thread counts.
template <typename Scalar>
void walsh_hadamard_inplace(Eigen::Ref<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> v) {
  const Eigen::Index size = v.size();
  if (size == 0 || (size & (size - 1)) != 0)
    throw std::invalid_argument("walsh_hadamard_inplace: length must be a power of two");
  for (Eigen::Index half = 1; half < size; half <<= 1) {
    for (Eigen::Index block = 0; block < size; block += 2 * half) {
      for (Eigen::Index i = block; i < block + half; ++i) {
        const Scalar a = v[i];
        const Scalar b = v[i + half];
        v[i] = a + b;
        v[i + half] = a - b;
      }
    }
  }
}

}  // namespace qcbm
