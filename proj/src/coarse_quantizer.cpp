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

#include "rairs/coarse_quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "rairs/distance.hpp"

namespace rairs {

namespace {

std::vector<float> kmeanspp_seed(std::span<const float> data, std::size_t dim,
                                 std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = data.size() / dim;
  std::vector<float> cent(k * dim);
  std::vector<double> mind(n, std::numeric_limits<double>::infinity());

  std::size_t pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  for (std::size_t c = 0; c < k; ++c) {
    std::copy_n(data.data() + pick * dim, dim, cent.data() + c * dim);
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = l2_sqr(data.data() + i * dim, cent.data() + c * dim, dim);
      mind[i] = std::min(mind[i], d);
      total += mind[i];
    }
    if (c + 1 == k) break;
    if (total > 0) {
      const double r = std::uniform_real_distribution<double>(0, total)(rng);
      double acc = 0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += mind[i];
        if (acc > r && mind[i] > 0) {
          pick = i;
          break;
        }
      }
      // Rounding at the tail can land on a zero-weight point.
      while (mind[pick] == 0 && pick > 0) --pick;
    } else {
      pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    }
  }
  return cent;
}

}  // namespace

KMeansResult kmeans(std::span<const float> data, std::size_t dim,
                    std::size_t k, std::size_t iters, std::uint64_t seed) {
  if (dim == 0 || data.size() % dim != 0) {
    throw DimensionMismatch("kmeans: data size not a multiple of dim");
  }
  const std::size_t n = data.size() / dim;
  if (k == 0 || n < k) {
    throw std::invalid_argument("kmeans: need n >= k >= 1 (n=" +
                                std::to_string(n) + ", k=" +
                                std::to_string(k) + ")");
  }
  if (iters == 0) throw std::invalid_argument("kmeans: iters must be >= 1");

  std::mt19937_64 rng(seed);
  KMeansResult res;
  res.centroids = kmeanspp_seed(data, dim, k, rng);
  auto& cent = res.centroids;

  std::vector<std::uint32_t> assign(n);
  std::vector<float> dist(n);
  std::vector<double> sums(k * dim);
  std::vector<std::size_t> counts(k);

  for (std::size_t it = 0; it < iters; ++it) {
    double obj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const float* x = data.data() + i * dim;
      float best = std::numeric_limits<float>::infinity();
      std::uint32_t arg = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const float d = l2_sqr(x, cent.data() + c * dim, dim);
        if (d < best) {
          best = d;
          arg = static_cast<std::uint32_t>(c);
        }
      }
      assign[i] = arg;
      dist[i] = best;
      obj += best;
    }
    res.objective.push_back(obj);

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const float* x = data.data() + i * dim;
      double* s = sums.data() + assign[i] * dim;
      for (std::size_t j = 0; j < dim; ++j) s[j] += x[j];
      ++counts[assign[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t j = 0; j < dim; ++j) {
        cent[c * dim + j] = static_cast<float>(sums[c * dim + j] / counts[c]);
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      const auto far = static_cast<std::size_t>(
          std::max_element(dist.begin(), dist.end()) - dist.begin());
      std::copy_n(data.data() + far * dim, dim, cent.data() + c * dim);
      dist[far] = 0;
    }
  }
  return res;
}

CoarseQuantizer::CoarseQuantizer(std::size_t dim, Metric metric,
                                 std::vector<float> centroids)
    : dim_(dim), metric_(metric), centroids_(std::move(centroids)) {
  if (dim_ == 0 || centroids_.empty() || centroids_.size() % dim_ != 0) {
    throw std::invalid_argument("CoarseQuantizer: bad centroid matrix");
  }
  nlist_ = centroids_.size() / dim_;
  if (nlist_ >= 0xFFFF) {
    throw std::invalid_argument("CoarseQuantizer: nlist must be < 65535");
  }
  for (float v : centroids_) {
    if (std::isnan(v)) throw std::invalid_argument("CoarseQuantizer: NaN centroid");
  }
}

CoarseQuantizer CoarseQuantizer::train(const VectorSet& data, std::size_t nlist,
                                       std::size_t iters, std::uint64_t seed,
                                       Metric metric,
                                       std::vector<double>* objective) {
  if (data.count() < nlist) {
    throw std::invalid_argument("CoarseQuantizer::train: fewer points (" +
                                std::to_string(data.count()) + ") than nlist (" +
                                std::to_string(nlist) + ")");
  }
  auto res = kmeans(data.data(), data.dim(), nlist, iters, seed);
  if (objective) *objective = std::move(res.objective);
  return CoarseQuantizer(data.dim(), metric, std::move(res.centroids));
}

std::vector<ListId> CoarseQuantizer::find_nearest_lists(const float* q,
                                                        std::size_t m) const {
  m = std::min(m, nlist_);
  std::vector<std::pair<float, ListId>> scored(nlist_);
  for (std::size_t c = 0; c < nlist_; ++c) {
    scored[c] = {metric_score(metric_, q, centroid(ListId(c)), dim_),
                 static_cast<ListId>(c)};
  }
  std::partial_sort(scored.begin(), scored.begin() + m, scored.end());
  std::vector<ListId> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = scored[i].second;
  return out;
}

std::size_t default_nlist(std::size_t n) {
  if (n <= 1) return 1;
  const double root = std::sqrt(static_cast<double>(n));
  const double lg = std::round(std::log2(root));
  return static_cast<std::size_t>(std::exp2(std::max(0.0, lg)));
}

}  // namespace rairs
