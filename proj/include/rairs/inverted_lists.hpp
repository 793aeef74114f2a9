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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rairs/common.hpp"
#include "rairs/pq.hpp"

namespace rairs {

struct Candidate {
  VecId id;
  float score;  // approximate (during scan) or exact (after refine); smaller is better
};

/// Bounded max-heap keeping the `capacity` best (score, id) pairs.
class TopK {
 public:
  explicit TopK(std::size_t capacity = 0) : cap_(capacity) {}

  void reset(std::size_t capacity) {
    cap_ = capacity;
    heap_.clear();
  }
  std::size_t size() const { return heap_.size(); }

  void push(float score, VecId id) {
    if (cap_ == 0) return;
    const Entry e{score, id};
    if (heap_.size() < cap_) {
      heap_.push_back(e);
      std::push_heap(heap_.begin(), heap_.end());
    } else if (e < heap_.front()) {
      std::pop_heap(heap_.begin(), heap_.end());
      heap_.back() = e;
      std::push_heap(heap_.begin(), heap_.end());
    }
  }

  /// Ascending by (score, id).
  std::vector<Candidate> sorted() const {
    auto tmp = heap_;
    std::sort(tmp.begin(), tmp.end());
    std::vector<Candidate> out;
    out.reserve(tmp.size());
    for (const auto& e : tmp) out.push_back({e.id, e.score});
    return out;
  }

 private:
  struct Entry {
    float score;
    VecId id;
    bool operator<(const Entry& o) const {
      return score < o.score || (score == o.score && id < o.id);
    }
  };
  std::size_t cap_;
  std::vector<Entry> heap_;
};

/// Lists already processed for one query. Small and sorted.
class VisitedLists {
 public:
  void clear() { lists_.clear(); }
  bool contains(ListId l) const {
    return std::binary_search(lists_.begin(), lists_.end(), l);
  }
  void add(ListId l) {
    auto it = std::lower_bound(lists_.begin(), lists_.end(), l);
    if (it == lists_.end() || *it != l) lists_.insert(it, l);
  }
  std::size_t size() const { return lists_.size(); }

 private:
  std::vector<ListId> lists_;
};

struct SearchCounters {
  /// Approximate distance evaluations on valid slots.
  std::size_t scan_dco = 0;
  std::size_t blocks_scanned = 0;
  std::size_t ref_entries_skipped = 0;
  /// Misc items dropped because their other list was already visited.
  std::size_t misc_dropped = 0;

  SearchCounters& operator+=(const SearchCounters& o) {
    scan_dco += o.scan_dco;
    blocks_scanned += o.blocks_scanned;
    ref_entries_skipped += o.ref_entries_skipped;
    misc_dropped += o.misc_dropped;
    return *this;
  }
};

/// Per-query state while traversing lists.
struct QueryScratch {
  VisitedLists visited;
  TopK heap;
  SearchCounters counters;
  /// IDs already pushed; only the duplicated layout needs it.
  std::unordered_set<VecId> seen;

  void reset(std::size_t big_k) {
    visited.clear();
    heap.reset(big_k);
    counters = {};
    seen.clear();
  }
};

enum class LayoutKind : std::uint8_t { kSeil = 0, kPlain = 1 };

std::string_view layout_name(LayoutKind k);
LayoutKind parse_layout(std::string_view s);

/// Outcome of a delete batch.
struct DeleteReport {
  std::vector<VecId> deleted;
  std::vector<VecId> missing;
};

/// Storage of PQ codes across nlist lists.
class InvertedLists {
 public:
  virtual ~InvertedLists() = default;

  virtual LayoutKind kind() const = 0;
  virtual std::size_t nlist() const = 0;
  virtual std::size_t block_size() const = 0;
  /// Number of distinct vectors stored.
  virtual std::size_t num_vectors() const = 0;
  /// Valid slots across all blocks (stored code copies).
  virtual std::size_t num_stored_items() const = 0;
  virtual bool contains(VecId id) const = 0;
  /// Lists the vector is assigned to, ascending.
  virtual std::vector<ListId> lists_of(VecId id) const = 0;

  /// Scans one list for one query and marks it visited. Lists must be fed
  /// in ascending ID order per query.
  virtual void scan_list(const Lut& lut, ListId list, QueryScratch& qs) const = 0;

  /// Removes vectors; unknown IDs are reported, the rest proceed.
  virtual DeleteReport remove(std::span<const VecId> ids) = 0;

  virtual void write(std::ostream& out) const = 0;

  /// Full per-query traversal: sorts `selected` ascending, scans each
  /// list and returns the best `big_k` distinct candidates.
  std::vector<Candidate> search(const Lut& lut, std::span<const ListId> selected,
                                std::size_t big_k,
                                SearchCounters* counters = nullptr) const;
};

}  // namespace rairs
