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

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "rairs/assignment.hpp"
#include "rairs/inverted_lists.hpp"
#include "rairs/pq.hpp"

namespace rairs {

/// Stored-ID word layout: bits 0..47 vector ID, bits 48..63 hold
/// (other list + 1) for misc slots and 0 for shared-block slots.
/// All-ones is the invalid ID.
namespace stored_id {

inline constexpr int kListShift = 48;
inline constexpr std::uint64_t kVecMask = (std::uint64_t{1} << kListShift) - 1;

inline std::uint64_t shared(VecId v) { return v & kVecMask; }
inline std::uint64_t misc(VecId v, ListId other) {
  return (v & kVecMask) | (std::uint64_t(other) + 1) << kListShift;
}
inline VecId vec_id(std::uint64_t w) { return w & kVecMask; }
/// Embedded other list, or empty for a shared-block slot.
inline std::optional<ListId> other_list(std::uint64_t w) {
  const auto hi = w >> kListShift;
  if (hi == 0) return std::nullopt;
  return static_cast<ListId>(hi - 1);
}

}  // namespace stored_id

/// Points at `nblocks` contiguous shared blocks stored in `other_list`.
struct RefEntry {
  ListId other_list = 0;
  std::uint32_t nblocks = 0;
  std::uint32_t block_offset = 0;
  friend bool operator==(const RefEntry&, const RefEntry&) = default;
};

struct SeilList {
  std::vector<RefEntry> ref_entries;
  /// Full blocks of cells (this, j) with this <= j, stored once.
  BlockArray shared_blocks;
  /// Cell remainders; only the last block may be partially filled.
  BlockArray misc_blocks;
  std::size_t misc_items = 0;
};

struct CellStats {
  std::size_t block_size = 0;
  std::size_t num_cells = 0;
  std::size_t num_vectors = 0;
  /// cell size -> number of cells of that size
  std::map<std::size_t, std::size_t> size_histogram;
  /// Share of cell membership (sum of cell sizes) in cells of size >= block_size.
  double large_cell_fraction = 0;
  /// Share of vectors whose cell spans two distinct lists.
  double two_list_fraction = 0;
  std::size_t shared_block_items = 0;
  std::size_t misc_item_copies = 0;

  std::size_t stored_copies() const { return shared_block_items + misc_item_copies; }
  /// (cell size, cumulative share of vectors in cells of at most that size).
  std::vector<std::pair<std::size_t, double>> cdf() const;
};

CellStats cell_stats(std::span<const Assignment> assigns, std::size_t block_size);

enum class Area : std::uint8_t { kShared = 0, kMisc = 1 };

struct ItemLocation {
  ListId list = 0;
  Area area = Area::kShared;
  std::uint32_t block = 0;
  std::uint32_t slot = 0;
  friend bool operator==(const ItemLocation&, const ItemLocation&) = default;
};

/// Where a vector lives: its cell and up to two physical slots.
struct SeilEntry {
  ListId list1 = 0;
  ListId list2 = 0;
  std::uint8_t nloc = 0;
  std::array<ItemLocation, 2> loc{};
};

/// Shared-cell lists: full blocks of each cell are stored once (in the
/// smaller list) and referenced from the other list; the remainder is
/// duplicated in both lists' misc areas with the other list ID embedded.
class SeilLists final : public InvertedLists {
 public:
  SeilLists(std::size_t nlist, std::size_t num_groups, std::size_t block_size);

  LayoutKind kind() const override { return LayoutKind::kSeil; }
  std::size_t nlist() const override { return lists_.size(); }
  std::size_t block_size() const override { return block_size_; }
  std::size_t num_groups() const { return num_groups_; }
  std::size_t num_vectors() const override { return locations_.size(); }
  std::size_t num_stored_items() const override;
  bool contains(VecId id) const override { return locations_.count(id) != 0; }
  std::vector<ListId> lists_of(VecId id) const override;

  const SeilList& list(ListId l) const { return lists_[l]; }
  const std::unordered_map<VecId, SeilEntry>& locations() const {
    return locations_;
  }

  /// Inserts one batch. `codes` holds code_size bytes per assignment, in
  /// the same order. Rejects the whole batch on a duplicate ID.
  void insert(std::span<const Assignment> assigns,
              std::span<const std::uint8_t> codes);

  void scan_list(const Lut& lut, ListId list, QueryScratch& qs) const override;
  DeleteReport remove(std::span<const VecId> ids) override;

  /// Valid shared-block items per cell (i < j), for DCO accounting.
  std::map<std::pair<ListId, ListId>, std::size_t> shared_items_per_cell() const;

  void write(std::ostream& out) const override;
  static SeilLists read(std::istream& in);

  /// Throws std::logic_error if the location map and list contents disagree.
  void check_invariants() const;

 private:
  void append_misc(ListId list, VecId v, ListId other,
                   const std::uint8_t* code);
  void remove_misc(ListId list, std::uint32_t block, std::uint32_t slot);
  ItemLocation* find_loc(SeilEntry& e, ListId list, Area area);

  std::size_t num_groups_;
  std::size_t block_size_;
  std::vector<SeilList> lists_;
  std::unordered_map<VecId, SeilEntry> locations_;
};

}  // namespace rairs
