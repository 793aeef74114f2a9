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
#include <cstdint>
#include <span>
#include <vector>

#include "rairs/common.hpp"
#include "rairs/dataset.hpp"

namespace rairs {

struct KMeansResult {
  std::vector<float> centroids;  // k * dim
  /// Sum of squared distances to the assigned centroid, one entry per
  /// Lloyd iteration (measured after each assignment step).
  std::vector<double> objective;
};

/// k-means++ seeding followed by Lloyd iterations. Empty clusters are
/// re-seeded from the point farthest from its centroid.
KMeansResult kmeans(std::span<const float> data, std::size_t dim,
                    std::size_t k, std::size_t iters, std::uint64_t seed);

/// IVF centroids plus the nearest-lists query used by both insertion and
/// search.
class CoarseQuantizer {
 public:
  CoarseQuantizer() = default;
  CoarseQuantizer(std::size_t dim, Metric metric, std::vector<float> centroids);

  static CoarseQuantizer train(const VectorSet& data, std::size_t nlist,
                               std::size_t iters, std::uint64_t seed,
                               Metric metric = Metric::kL2,
                               std::vector<double>* objective = nullptr);

  std::size_t nlist() const { return nlist_; }
  std::size_t dim() const { return dim_; }
  Metric metric() const { return metric_; }
  const std::vector<float>& centroids() const { return centroids_; }
  const float* centroid(ListId i) const {
    return centroids_.data() + std::size_t(i) * dim_;
  }

  /// The m best lists, ascending L2 (descending inner product); ties by
  /// ascending list ID.
  std::vector<ListId> find_nearest_lists(const float* q, std::size_t m) const;
  std::vector<ListId> find_nearest_lists(std::span<const float> q,
                                         std::size_t m) const {
    return find_nearest_lists(q.data(), m);
  }

 private:
  std::size_t dim_ = 0;
  std::size_t nlist_ = 0;
  Metric metric_ = Metric::kL2;
  std::vector<float> centroids_;
};

/// ~sqrt(n) rounded to the nearest power of two, at least 1.
std::size_t default_nlist(std::size_t n);

}  // namespace rairs
