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

#include "rairs/plain_lists.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "rairs/binary_io.hpp"

namespace rairs {

PlainLists::PlainLists(std::size_t nlist, std::size_t num_groups,
                       std::size_t block_size)
    : num_groups_(num_groups), block_size_(block_size) {
  if (nlist == 0) throw std::invalid_argument("PlainLists: nlist == 0");
  if (block_size == 0 || block_size > kMaxBlockSize) {
    throw std::invalid_argument("PlainLists: block size must be in [1, 256]");
  }
  lists_.assign(nlist, BlockArray(num_groups, block_size));
  sizes_.assign(nlist, 0);
}

std::size_t PlainLists::num_stored_items() const {
  std::size_t n = 0;
  for (auto s : sizes_) n += s;
  return n;
}

std::vector<ListId> PlainLists::lists_of(VecId id) const {
  std::vector<ListId> out;
  auto it = locations_.find(id);
  if (it == locations_.end()) return out;
  for (const auto& s : it->second) out.push_back(s.list);
  std::sort(out.begin(), out.end());
  return out;
}

void PlainLists::insert(std::span<const VecId> ids,
                        std::span<const std::vector<ListId>> lists,
                        std::span<const std::uint8_t> codes) {
  if (ids.size() != lists.size() || codes.size() != ids.size() * num_groups_) {
    throw std::invalid_argument("PlainLists::insert: misaligned inputs");
  }
  std::unordered_set<VecId> batch;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (locations_.count(ids[i]) || !batch.insert(ids[i]).second) {
      throw IdError("PlainLists::insert: duplicate vector id " +
                    std::to_string(ids[i]));
    }
    if (lists[i].empty()) throw std::invalid_argument("PlainLists::insert: no lists");
    for (ListId l : lists[i]) {
      if (l >= lists_.size()) throw std::invalid_argument("PlainLists::insert: bad list");
    }
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto& locs = locations_[ids[i]];
    std::vector<ListId> ls = lists[i];
    std::sort(ls.begin(), ls.end());
    ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
    for (ListId l : ls) {
      const std::size_t pos = sizes_[l]++;
      if (pos % block_size_ == 0) lists_[l].add_block();
      lists_[l].set_slot(pos / block_size_, pos % block_size_,
                         codes.data() + i * num_groups_, ids[i]);
      locs.push_back({l, static_cast<std::uint32_t>(pos)});
    }
  }
}

void PlainLists::scan_list(const Lut& lut, ListId list, QueryScratch& qs) const {
  const BlockArray& arr = lists_[list];
  for (std::size_t b = 0; b < arr.num_blocks(); ++b) {
    qs.counters.scan_dco +=
        scan_block(lut, arr.block(b), [&](std::uint64_t id, float d) {
          // Every copy of a vector carries the same code, hence the same
          // distance, so the first occurrence is authoritative.
          if (qs.seen.insert(id).second) qs.heap.push(d, id);
        });
    ++qs.counters.blocks_scanned;
  }
  qs.visited.add(list);
}

DeleteReport PlainLists::remove(std::span<const VecId> ids) {
  DeleteReport rep;
  std::vector<std::uint8_t> code(num_groups_);
  for (VecId id : ids) {
    auto it = locations_.find(id);
    if (it == locations_.end()) {
      rep.missing.push_back(id);
      continue;
    }
    const auto slots = it->second;
    locations_.erase(it);
    for (const Slot& s : slots) {
      BlockArray& arr = lists_[s.list];
      const std::size_t last = --sizes_[s.list];
      if (s.pos != last) {
        arr.read_code(last / block_size_, last % block_size_, code.data());
        const std::uint64_t moved = arr.slot_id(last / block_size_, last % block_size_);
        arr.set_slot(s.pos / block_size_, s.pos % block_size_, code.data(), moved);
        for (Slot& ms : locations_.at(moved)) {
          if (ms.list == s.list) ms.pos = s.pos;
        }
      }
      arr.invalidate(last / block_size_, last % block_size_);
      if (last % block_size_ == 0) arr.pop_block();
    }
    rep.deleted.push_back(id);
  }
  return rep;
}

void PlainLists::write(std::ostream& out) const {
  bin::put<std::uint64_t>(out, lists_.size());
  bin::put<std::uint64_t>(out, num_groups_);
  bin::put<std::uint64_t>(out, block_size_);
  for (std::size_t l = 0; l < lists_.size(); ++l) {
    bin::put<std::uint64_t>(out, sizes_[l]);
    bin::put_vec(out, lists_[l].raw_codes());
    bin::put_vec(out, lists_[l].raw_ids());
  }
}

PlainLists PlainLists::read(std::istream& in) {
  const auto nlist = bin::get<std::uint64_t>(in);
  const auto m = bin::get<std::uint64_t>(in);
  const auto bs = bin::get<std::uint64_t>(in);
  PlainLists p(nlist, m, bs);
  for (std::size_t l = 0; l < nlist; ++l) {
    p.sizes_[l] = bin::get<std::uint64_t>(in);
    auto codes = bin::get_vec<std::uint8_t>(in);
    auto ids = bin::get_vec<std::uint64_t>(in);
    p.lists_[l].assign_raw(std::move(codes), std::move(ids));
    if (p.lists_[l].total_valid() != p.sizes_[l]) {
      throw FormatError("index file: plain list size mismatch");
    }
    for (std::size_t pos = 0; pos < p.sizes_[l]; ++pos) {
      const auto id = p.lists_[l].slot_id(pos / bs, pos % bs);
      p.locations_[id].push_back(
          {static_cast<ListId>(l), static_cast<std::uint32_t>(pos)});
    }
  }
  return p;
}

}  // namespace rairs
