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
#include <filesystem>
#include <span>
#include <vector>

#include "rairs/common.hpp"

namespace rairs {

/// Largest vector ID the index can store (leaves the top 16 bits free).
inline constexpr VecId kMaxVecId = (VecId{1} << 48) - 1;

/// Dense row-major float matrix with one stable ID per row.
class VectorSet {
 public:
  VectorSet() = default;
  explicit VectorSet(std::size_t dim) : dim_(dim) {}
  /// Rows get sequential IDs 0..n-1.
  VectorSet(std::size_t dim, std::vector<float> data);
  VectorSet(std::size_t dim, std::vector<float> data, std::vector<VecId> ids);

  std::size_t dim() const { return dim_; }
  std::size_t count() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

  std::span<const float> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  const float* row_ptr(std::size_t i) const { return data_.data() + i * dim_; }
  VecId id(std::size_t i) const { return ids_[i]; }

  const std::vector<float>& data() const { return data_; }
  const std::vector<VecId>& ids() const { return ids_; }

  void append(std::span<const float> v, VecId id);
  /// Rows [begin, end) with their IDs kept.
  VectorSet slice(std::size_t begin, std::size_t end) const;
  /// Same rows, IDs replaced by first_id, first_id+1, ...
  VectorSet renumbered(VecId first_id) const;

  /// Checks the finite-value, unique-ID and ID-range invariants.
  void validate() const;

  bool operator==(const VectorSet&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<float> data_;
  std::vector<VecId> ids_;
};

/// Integer records from an .ivecs file (ground truth lists).
struct IntRecords {
  std::size_t dim = 0;
  std::vector<std::int32_t> data;
  std::size_t count() const { return dim == 0 ? 0 : data.size() / dim; }
};

enum class VecFormat { kFvecs, kBvecs, kIvecs };

VecFormat format_from_path(const std::filesystem::path& path);

/// Reads an fvecs/bvecs file; bvecs bytes are widened to floats.
VectorSet load_vectors(const std::filesystem::path& path, VecFormat format);
VectorSet load_vectors(const std::filesystem::path& path);
IntRecords load_ivecs(const std::filesystem::path& path);

void write_fvecs(const std::filesystem::path& path, const VectorSet& v);
/// Values are rounded and clamped to [0, 255].
void write_bvecs(const std::filesystem::path& path, const VectorSet& v);
void write_ivecs(const std::filesystem::path& path, const IntRecords& r);

/// Isotropic Gaussian blobs around nclusters uniform centers in [0,1]^dim;
/// point i belongs to center i % nclusters.
VectorSet generate_synthetic(std::size_t n, std::size_t dim,
                             std::size_t nclusters, std::uint64_t seed,
                             float spread);

struct GroundTruth {
  std::size_t k = 0;
  Metric metric = Metric::kL2;
  std::vector<VecId> ids;  // nq * k
  /// nq * k user-facing distances; empty when loaded from ivecs.
  std::vector<float> distances;

  std::size_t num_queries() const { return k == 0 ? 0 : ids.size() / k; }
  std::span<const VecId> ids_of(std::size_t q) const {
    return {ids.data() + q * k, k};
  }
  bool has_distances() const { return !distances.empty(); }

  IntRecords to_ivecs() const;
  static GroundTruth from_ivecs(const IntRecords& r, Metric metric);
};

/// Exhaustive top-k; ties broken by smaller ID.
GroundTruth exact_knn(const VectorSet& base, const VectorSet& queries,
                      std::size_t k, Metric metric, int num_threads = 1);

}  // namespace rairs
