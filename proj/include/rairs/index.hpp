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
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "rairs/assignment.hpp"
#include "rairs/coarse_quantizer.hpp"
#include "rairs/dataset.hpp"
#include "rairs/inverted_lists.hpp"
#include "rairs/pq.hpp"
#include "rairs/seil.hpp"

namespace rairs {

struct IndexParams {
  std::size_t nlist = 0;        // 0: ~sqrt(n) rounded to a power of two
  std::size_t pq_groups = 0;    // 0: dim / 2
  std::size_t nbits = 4;
  std::size_t block_size = 32;
  Metric metric = Metric::kL2;
  StrategyConfig strategy{};
  /// Forced to kPlain when the strategy assigns to more than two lists.
  LayoutKind layout = LayoutKind::kSeil;
  std::size_t kmeans_iters = 25;
  /// Training subsample cap (0 = use every training vector).
  std::size_t max_train_points = 0;
  std::uint64_t seed = 1;
};

struct SearchParams {
  std::size_t k = 10;
  std::size_t nprobe = 1;
  std::size_t k_factor = 0;  // 0: 10 for k <= 10, 4 otherwise
  int num_threads = 1;

  std::size_t effective_k_factor() const {
    return k_factor != 0 ? k_factor : (k <= 10 ? 10 : 4);
  }
  std::size_t big_k() const { return k * effective_k_factor(); }
};

struct Neighbor {
  VecId id;
  float distance;  // squared L2, or inner product
};

struct QueryStats {
  SearchCounters counters;
  std::size_t refine_dco = 0;
};

struct SearchResults {
  std::size_t k = 0;
  std::vector<std::vector<Neighbor>> neighbors;  // per query, best first
  std::vector<QueryStats> stats;                 // per query
  /// Grouped mode only: how often the traversal moved to a different list.
  std::size_t list_switches = 0;

  std::size_t num_queries() const { return neighbors.size(); }
};

/// Raw vectors kept for exact re-ranking, addressable by vector ID.
class RefineStore {
 public:
  explicit RefineStore(std::size_t dim = 0) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return row_of_.size(); }
  bool contains(VecId id) const { return row_of_.count(id) != 0; }
  const float* get(VecId id) const;
  void add(const float* v, VecId id);
  bool remove(VecId id);
  /// Live rows in ascending ID order.
  VectorSet live() const;

 private:
  std::size_t dim_;
  std::vector<float> data_;
  std::unordered_map<VecId, std::size_t> row_of_;
};

/// IVF-PQ index with redundant list assignment and a choice of list layout.
class RairsIndex {
 public:
  /// Trains the coarse quantizer and PQ codebook on `train_data`.
  static RairsIndex train(const VectorSet& train_data, IndexParams params);

  /// Wraps already-trained components (lets several indexes share them).
  RairsIndex(CoarseQuantizer cq, PQCodebook pq, IndexParams params);

  RairsIndex(RairsIndex&&) noexcept = default;
  RairsIndex& operator=(RairsIndex&&) noexcept = default;

  const IndexParams& params() const { return params_; }
  const CoarseQuantizer& quantizer() const { return cq_; }
  const PQCodebook& codebook() const { return pq_; }
  const InvertedLists& lists() const { return *lists_; }
  /// Null unless the layout is SEIL.
  const SeilLists* seil() const;
  const RefineStore& refine_store() const { return store_; }
  std::size_t dim() const { return cq_.dim(); }
  std::size_t ntotal() const { return lists_->num_vectors(); }

  /// Assigns, encodes and inserts one batch. IDs must be new.
  void add(const VectorSet& vecs, int num_threads = 1);

  /// One query at a time.
  SearchResults search(const VectorSet& queries, const SearchParams& sp) const;
  /// Same results; (query, list) tasks are grouped by list so each list is
  /// traversed once per batch.
  SearchResults search_grouped(const VectorSet& queries,
                               const SearchParams& sp) const;

  DeleteReport remove(std::span<const VecId> ids);

  /// Cell of every stored vector (two-way strategies only).
  std::vector<Assignment> pair_assignments() const;

  void save(const std::filesystem::path& path) const;
  static RairsIndex load(const std::filesystem::path& path);

 private:
  RairsIndex() = default;
  void check_search_args(const VectorSet& queries, const SearchParams& sp) const;
  std::vector<Neighbor> refine(const float* q, std::span<const Candidate> cands,
                               std::size_t k) const;

  IndexParams params_;
  CoarseQuantizer cq_;
  PQCodebook pq_;
  std::unique_ptr<InvertedLists> lists_;
  RefineStore store_;

  friend void write_index(const RairsIndex&, std::ostream&);
  friend RairsIndex read_index(std::istream&);
};

void write_index(const RairsIndex& index, std::ostream& out);
RairsIndex read_index(std::istream& in);

}  // namespace rairs
