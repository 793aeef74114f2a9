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
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "rairs/inverted_lists.hpp"
#include "rairs/pq.hpp"

namespace rairs {

/// Conventional fast-scan lists: every assigned list holds its own copy of
/// the code. Duplicates are removed after distance computation.
class PlainLists final : public InvertedLists {
 public:
  PlainLists(std::size_t nlist, std::size_t num_groups, std::size_t block_size);

  LayoutKind kind() const override { return LayoutKind::kPlain; }
  std::size_t nlist() const override { return lists_.size(); }
  std::size_t block_size() const override { return block_size_; }
  std::size_t num_vectors() const override { return locations_.size(); }
  std::size_t num_stored_items() const override;
  bool contains(VecId id) const override { return locations_.count(id) != 0; }
  std::vector<ListId> lists_of(VecId id) const override;

  /// `lists[i]` are the distinct lists of vector `ids[i]`.
  void insert(std::span<const VecId> ids,
              std::span<const std::vector<ListId>> lists,
              std::span<const std::uint8_t> codes);

  void scan_list(const Lut& lut, ListId list, QueryScratch& qs) const override;
  DeleteReport remove(std::span<const VecId> ids) override;

  std::size_t list_size(ListId l) const { return sizes_[l]; }
  const BlockArray& blocks(ListId l) const { return lists_[l]; }

  void write(std::ostream& out) const override;
  static PlainLists read(std::istream& in);

 private:
  struct Slot {
    ListId list;
    std::uint32_t pos;  // item index within the list
  };

  std::size_t num_groups_;
  std::size_t block_size_;
  std::vector<BlockArray> lists_;
  std::vector<std::size_t> sizes_;
  std::unordered_map<VecId, std::vector<Slot>> locations_;
};

}  // namespace rairs
