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

#include "rairs/seil.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "rairs/binary_io.hpp"

namespace rairs {

std::string_view layout_name(LayoutKind k) {
  return k == LayoutKind::kSeil ? "seil" : "plain";
}

LayoutKind parse_layout(std::string_view s) {
  if (s == "seil") return LayoutKind::kSeil;
  if (s == "plain") return LayoutKind::kPlain;
  throw std::invalid_argument("unknown layout: " + std::string(s));
}

std::vector<Candidate> InvertedLists::search(const Lut& lut,
                                             std::span<const ListId> selected,
                                             std::size_t big_k,
                                             SearchCounters* counters) const {
  std::vector<ListId> order(selected.begin(), selected.end());
  std::sort(order.begin(), order.end());
  if (std::adjacent_find(order.begin(), order.end()) != order.end()) {
    throw std::invalid_argument("search: selected lists must be distinct");
  }
  QueryScratch qs;
  qs.reset(big_k);
  for (ListId l : order) {
    if (l >= nlist()) throw std::out_of_range("search: list id out of range");
    scan_list(lut, l, qs);
  }
  if (counters) *counters += qs.counters;
  return qs.heap.sorted();
}

// ---------------------------------------------------------------------------

std::vector<std::pair<std::size_t, double>> CellStats::cdf() const {
  std::vector<std::pair<std::size_t, double>> out;
  std::size_t total = 0;
  for (const auto& [size, cnt] : size_histogram) total += size * cnt;
  std::size_t acc = 0;
  for (const auto& [size, cnt] : size_histogram) {
    acc += size * cnt;
    out.emplace_back(size, total ? double(acc) / double(total) : 0.0);
  }
  return out;
}

CellStats cell_stats(std::span<const Assignment> assigns, std::size_t block_size) {
  if (block_size == 0) throw std::invalid_argument("cell_stats: block_size == 0");
  std::vector<std::pair<ListId, ListId>> cells;
  cells.reserve(assigns.size());
  for (const auto& a : assigns) {
    cells.emplace_back(std::min(a.list1, a.list2), std::max(a.list1, a.list2));
  }
  std::sort(cells.begin(), cells.end());

  CellStats st;
  st.block_size = block_size;
  st.num_vectors = assigns.size();
  std::size_t large = 0, two_list = 0;
  for (std::size_t i = 0; i < cells.size();) {
    std::size_t j = i;
    while (j < cells.size() && cells[j] == cells[i]) ++j;
    const std::size_t n = j - i;
    const bool same = cells[i].first == cells[i].second;
    ++st.num_cells;
    ++st.size_histogram[n];
    if (n >= block_size) large += n;
    if (!same) two_list += n;
    st.shared_block_items += block_size * (n / block_size);
    st.misc_item_copies += (same ? 1 : 2) * (n % block_size);
    i = j;
  }
  if (!assigns.empty()) {
    st.large_cell_fraction = double(large) / double(assigns.size());
    st.two_list_fraction = double(two_list) / double(assigns.size());
  }
  return st;
}

// ---------------------------------------------------------------------------

SeilLists::SeilLists(std::size_t nlist, std::size_t num_groups,
                     std::size_t block_size)
    : num_groups_(num_groups), block_size_(block_size) {
  if (nlist == 0 || nlist >= 0xFFFF) {
    throw std::invalid_argument("SeilLists: nlist must be in [1, 65534]");
  }
  if (block_size == 0 || block_size > kMaxBlockSize) {
    throw std::invalid_argument("SeilLists: block size must be in [1, 256]");
  }
  lists_.resize(nlist);
  for (auto& l : lists_) {
    l.shared_blocks = BlockArray(num_groups, block_size);
    l.misc_blocks = BlockArray(num_groups, block_size);
  }
}

std::size_t SeilLists::num_stored_items() const {
  std::size_t n = 0;
  for (const auto& l : lists_) {
    n += l.shared_blocks.total_valid() + l.misc_blocks.total_valid();
  }
  return n;
}

std::vector<ListId> SeilLists::lists_of(VecId id) const {
  auto it = locations_.find(id);
  if (it == locations_.end()) return {};
  if (it->second.list1 == it->second.list2) return {it->second.list1};
  return {it->second.list1, it->second.list2};
}

ItemLocation* SeilLists::find_loc(SeilEntry& e, ListId list, Area area) {
  for (std::uint8_t i = 0; i < e.nloc; ++i) {
    if (e.loc[i].list == list && e.loc[i].area == area) return &e.loc[i];
  }
  return nullptr;
}

void SeilLists::append_misc(ListId list, VecId v, ListId other,
                            const std::uint8_t* code) {
  SeilList& l = lists_[list];
  // Tops up the previous batch's partial block before opening a new one.
  if (l.misc_items % block_size_ == 0) l.misc_blocks.add_block();
  const auto b = static_cast<std::uint32_t>(l.misc_items / block_size_);
  const auto s = static_cast<std::uint32_t>(l.misc_items % block_size_);
  l.misc_blocks.set_slot(b, s, code, stored_id::misc(v, other));
  ++l.misc_items;
  SeilEntry& e = locations_[v];
  e.loc[e.nloc++] = {list, Area::kMisc, b, s};
}

void SeilLists::insert(std::span<const Assignment> assigns,
                       std::span<const std::uint8_t> codes) {
  if (codes.size() != assigns.size() * num_groups_) {
    throw std::invalid_argument("SeilLists::insert: codes not aligned with assignments");
  }
  std::unordered_set<VecId> batch;
  batch.reserve(assigns.size());
  for (const auto& a : assigns) {
    if (a.list1 > a.list2 || a.list2 >= lists_.size()) {
      throw std::invalid_argument("SeilLists::insert: bad list pair (" +
                                  std::to_string(a.list1) + ", " +
                                  std::to_string(a.list2) + ")");
    }
    if (a.vec_id > stored_id::kVecMask) {
      throw IdError("SeilLists::insert: vector id exceeds 2^48-1");
    }
    if (locations_.count(a.vec_id) || !batch.insert(a.vec_id).second) {
      throw IdError("SeilLists::insert: duplicate vector id " +
                    std::to_string(a.vec_id));
    }
  }

  std::vector<std::size_t> order(assigns.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return assigns[x] < assigns[y];
  });

  const std::size_t bs = block_size_;
  for (std::size_t i = 0; i < order.size();) {
    const ListId l1 = assigns[order[i]].list1;
    const ListId l2 = assigns[order[i]].list2;
    std::size_t end = i + 1;
    while (end < order.size() && assigns[order[end]].list1 == l1 &&
           assigns[order[end]].list2 == l2) {
      ++end;
    }
    const std::size_t nitems = end - i;
    const std::size_t nblocks = nitems / bs;

    SeilList& home = lists_[l1];
    const auto offset = static_cast<std::uint32_t>(home.shared_blocks.num_blocks());
    for (std::size_t b = 0; b < nblocks; ++b) {
      const auto blk = static_cast<std::uint32_t>(home.shared_blocks.add_block());
      for (std::size_t s = 0; s < bs; ++s) {
        const std::size_t k = order[i + b * bs + s];
        const VecId v = assigns[k].vec_id;
        home.shared_blocks.set_slot(blk, s, codes.data() + k * num_groups_,
                                    stored_id::shared(v));
        SeilEntry& e = locations_[v];
        e.list1 = l1;
        e.list2 = l2;
        e.nloc = 1;
        e.loc[0] = {l1, Area::kShared, blk, static_cast<std::uint32_t>(s)};
      }
    }
    if (nblocks > 0 && l1 != l2) {
      lists_[l2].ref_entries.push_back(
          {l1, static_cast<std::uint32_t>(nblocks), offset});
    }
    for (std::size_t j = i + nblocks * bs; j < end; ++j) {
      const std::size_t k = order[j];
      const VecId v = assigns[k].vec_id;
      SeilEntry& e = locations_[v];
      e.list1 = l1;
      e.list2 = l2;
      e.nloc = 0;
      append_misc(l1, v, l2, codes.data() + k * num_groups_);
      if (l1 != l2) append_misc(l2, v, l1, codes.data() + k * num_groups_);
    }
    i = end;
  }
}

void SeilLists::scan_list(const Lut& lut, ListId list, QueryScratch& qs) const {
  const SeilList& l = lists_[list];
  auto push = [&](std::uint64_t w, float d) {
    qs.heap.push(d, stored_id::vec_id(w));
  };

  for (const RefEntry& ref : l.ref_entries) {
    if (qs.visited.contains(ref.other_list)) {
      ++qs.counters.ref_entries_skipped;
      continue;
    }
    const BlockArray& blocks = lists_[ref.other_list].shared_blocks;
    for (std::uint32_t b = 0; b < ref.nblocks; ++b) {
      qs.counters.scan_dco += scan_block(lut, blocks.block(ref.block_offset + b), push);
      ++qs.counters.blocks_scanned;
    }
  }

  for (std::size_t b = 0; b < l.shared_blocks.num_blocks(); ++b) {
    qs.counters.scan_dco += scan_block(lut, l.shared_blocks.block(b), push);
    ++qs.counters.blocks_scanned;
  }

  for (std::size_t b = 0; b < l.misc_blocks.num_blocks(); ++b) {
    qs.counters.scan_dco +=
        scan_block(lut, l.misc_blocks.block(b), [&](std::uint64_t w, float d) {
          const auto other = stored_id::other_list(w);
          if (other && qs.visited.contains(*other)) {
            ++qs.counters.misc_dropped;
            return;
          }
          qs.heap.push(d, stored_id::vec_id(w));
        });
    ++qs.counters.blocks_scanned;
  }
  qs.visited.add(list);
}

void SeilLists::remove_misc(ListId list, std::uint32_t block,
                            std::uint32_t slot) {
  SeilList& l = lists_[list];
  const std::size_t last = l.misc_items - 1;
  const auto lb = static_cast<std::uint32_t>(last / block_size_);
  const auto ls = static_cast<std::uint32_t>(last % block_size_);
  if (lb != block || ls != slot) {
    std::vector<std::uint8_t> code(num_groups_);
    l.misc_blocks.read_code(lb, ls, code.data());
    const std::uint64_t w = l.misc_blocks.slot_id(lb, ls);
    l.misc_blocks.set_slot(block, slot, code.data(), w);
    auto it = locations_.find(stored_id::vec_id(w));
    if (it == locations_.end()) {
      throw std::logic_error("SeilLists: misc item missing from location map");
    }
    ItemLocation* moved = find_loc(it->second, list, Area::kMisc);
    if (!moved) throw std::logic_error("SeilLists: misc location not found");
    moved->block = block;
    moved->slot = slot;
  }
  l.misc_blocks.invalidate(lb, ls);
  --l.misc_items;
  if (ls == 0) l.misc_blocks.pop_block();
}

DeleteReport SeilLists::remove(std::span<const VecId> ids) {
  DeleteReport rep;
  for (VecId id : ids) {
    auto it = locations_.find(id);
    if (it == locations_.end()) {
      rep.missing.push_back(id);
      continue;
    }
    const SeilEntry e = it->second;
    locations_.erase(it);
    for (std::uint8_t i = 0; i < e.nloc; ++i) {
      const ItemLocation& loc = e.loc[i];
      if (loc.area == Area::kShared) {
        lists_[loc.list].shared_blocks.invalidate(loc.block, loc.slot);
      } else {
        remove_misc(loc.list, loc.block, loc.slot);
      }
    }
    rep.deleted.push_back(id);
  }
  return rep;
}

std::map<std::pair<ListId, ListId>, std::size_t> SeilLists::shared_items_per_cell()
    const {
  std::map<std::pair<ListId, ListId>, std::size_t> out;
  for (std::size_t j = 0; j < lists_.size(); ++j) {
    for (const RefEntry& ref : lists_[j].ref_entries) {
      const BlockArray& blocks = lists_[ref.other_list].shared_blocks;
      std::size_t n = 0;
      for (std::uint32_t b = 0; b < ref.nblocks; ++b) {
        n += blocks.valid_count(ref.block_offset + b);
      }
      out[{ref.other_list, static_cast<ListId>(j)}] += n;
    }
  }
  return out;
}

void SeilLists::check_invariants() const {
  std::size_t expect_items = 0;
  for (const auto& [id, e] : locations_) {
    if (e.list1 > e.list2 || e.list2 >= lists_.size()) {
      throw std::logic_error("SeilLists: bad cell in location map");
    }
    for (std::uint8_t i = 0; i < e.nloc; ++i) {
      const ItemLocation& loc = e.loc[i];
      const SeilList& l = lists_[loc.list];
      const BlockArray& arr =
          loc.area == Area::kShared ? l.shared_blocks : l.misc_blocks;
      if (loc.block >= arr.num_blocks()) {
        throw std::logic_error("SeilLists: location block out of range");
      }
      const std::uint64_t w = arr.slot_id(loc.block, loc.slot);
      std::uint64_t expect = stored_id::shared(id);
      if (loc.area == Area::kMisc) {
        expect = stored_id::misc(id, loc.list == e.list1 ? e.list2 : e.list1);
      }
      if (w != expect) {
        throw std::logic_error("SeilLists: slot does not hold vector " +
                               std::to_string(id));
      }
      ++expect_items;
    }
  }
  if (expect_items != num_stored_items()) {
    throw std::logic_error("SeilLists: stored items disagree with location map");
  }
  for (const auto& l : lists_) {
    if (l.misc_blocks.num_blocks() !=
        (l.misc_items + block_size_ - 1) / block_size_) {
      throw std::logic_error("SeilLists: misc block count mismatch");
    }
    if (l.misc_blocks.total_valid() != l.misc_items) {
      throw std::logic_error("SeilLists: misc area not compact");
    }
    for (const auto& ref : l.ref_entries) {
      if (ref.block_offset + ref.nblocks >
          lists_[ref.other_list].shared_blocks.num_blocks()) {
        throw std::logic_error("SeilLists: dangling reference entry");
      }
    }
  }
}

// ---------------------------------------------------------------------------

void SeilLists::write(std::ostream& out) const {
  bin::put<std::uint64_t>(out, lists_.size());
  bin::put<std::uint64_t>(out, num_groups_);
  bin::put<std::uint64_t>(out, block_size_);
  for (const auto& l : lists_) {
    bin::put_vec(out, l.ref_entries);
    bin::put_vec(out, l.shared_blocks.raw_codes());
    bin::put_vec(out, l.shared_blocks.raw_ids());
    bin::put_vec(out, l.misc_blocks.raw_codes());
    bin::put_vec(out, l.misc_blocks.raw_ids());
    bin::put<std::uint64_t>(out, l.misc_items);
  }
  bin::put<std::uint64_t>(out, locations_.size());
  // Sorted so identical indexes serialize to identical bytes.
  std::vector<VecId> ids;
  ids.reserve(locations_.size());
  for (const auto& kv : locations_) ids.push_back(kv.first);
  std::sort(ids.begin(), ids.end());
  for (VecId id : ids) {
    bin::put(out, id);
    bin::put(out, locations_.at(id));
  }
}

SeilLists SeilLists::read(std::istream& in) {
  const auto nlist = bin::get<std::uint64_t>(in);
  const auto m = bin::get<std::uint64_t>(in);
  const auto bs = bin::get<std::uint64_t>(in);
  SeilLists s(nlist, m, bs);
  for (auto& l : s.lists_) {
    l.ref_entries = bin::get_vec<RefEntry>(in);
    auto sc = bin::get_vec<std::uint8_t>(in);
    auto si = bin::get_vec<std::uint64_t>(in);
    l.shared_blocks.assign_raw(std::move(sc), std::move(si));
    auto mc = bin::get_vec<std::uint8_t>(in);
    auto mi = bin::get_vec<std::uint64_t>(in);
    l.misc_blocks.assign_raw(std::move(mc), std::move(mi));
    l.misc_items = bin::get<std::uint64_t>(in);
  }
  const auto n = bin::get<std::uint64_t>(in);
  s.locations_.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto id = bin::get<VecId>(in);
    s.locations_[id] = bin::get<SeilEntry>(in);
  }
  try {
    s.check_invariants();
  } catch (const std::logic_error& e) {
    throw FormatError(std::string("index file: ") + e.what());
  }
  return s;
}

}  // namespace rairs
