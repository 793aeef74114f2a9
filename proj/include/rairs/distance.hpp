// Copyright 2026 The rairs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <span>

#include "rairs/common.hpp"

namespace rairs {

// Every exact distance in the library goes through these two kernels, so
// the ground-truth oracle and the refinement step agree bit for bit.

inline float l2_sqr(const float* a, const float* b, std::size_t d) {
  float acc[4] = {0.f, 0.f, 0.f, 0.f};
  std::size_t i = 0;
  for (; i + 4 <= d; i += 4) {
    for (std::size_t k = 0; k < 4; ++k) {
      const float t = a[i + k] - b[i + k];
      acc[k] += t * t;
    }
  }
  for (; i < d; ++i) {
    const float t = a[i] - b[i];
    acc[0] += t * t;
  }
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

inline float inner_product(const float* a, const float* b, std::size_t d) {
  float acc[4] = {0.f, 0.f, 0.f, 0.f};
  std::size_t i = 0;
  for (; i + 4 <= d; i += 4) {
    for (std::size_t k = 0; k < 4; ++k) acc[k] += a[i + k] * b[i + k];
  }
  for (; i < d; ++i) acc[0] += a[i] * b[i];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

/// Smaller is better for both metrics: squared L2, or negated dot product.
inline float metric_score(Metric m, const float* a, const float* b,
                          std::size_t d) {
  return m == Metric::kL2 ? l2_sqr(a, b, d) : -inner_product(a, b, d);
}

/// Converts an internal score back to the user-facing value
/// (squared distance for L2, similarity for inner product).
inline float score_to_distance(Metric m, float score) {
  return m == Metric::kL2 ? score : -score;
}

}  // namespace rairs
