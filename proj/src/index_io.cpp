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

#include <cstring>
#include <fstream>

#include "rairs/binary_io.hpp"
#include "rairs/index.hpp"
#include "rairs/plain_lists.hpp"

// Index file layout (little-endian):
//   u64 magic "RAIRSIDX", u32 version
//   header: dim, nlist, block_size, pq_groups, nbits (u64 each), metric (u8),
//           strategy kind (u8), lambda (f32), n_cands (u64), strict (u8),
//           m (u64), aggr (u8), layout (u8), kmeans_iters, seed (u64)
//   centroids, sub-centroids (length-prefixed f32 arrays)
//   list arrays (layout specific, see SeilLists::write / PlainLists::write)
//   refine store: ids (length-prefixed u64), rows (length-prefixed f32)

namespace rairs {

namespace {

constexpr std::uint64_t kMagic = 0x5844495352494152ULL;  // "RAIRSIDX"
constexpr std::uint32_t kVersion = 1;

}  // namespace

void write_index(const RairsIndex& index, std::ostream& out) {
  const IndexParams& p = index.params_;
  bin::put(out, kMagic);
  bin::put(out, kVersion);
  bin::put<std::uint64_t>(out, index.dim());
  bin::put<std::uint64_t>(out, p.nlist);
  bin::put<std::uint64_t>(out, p.block_size);
  bin::put<std::uint64_t>(out, p.pq_groups);
  bin::put<std::uint64_t>(out, p.nbits);
  bin::put<std::uint8_t>(out, static_cast<std::uint8_t>(p.metric));
  bin::put<std::uint8_t>(out, static_cast<std::uint8_t>(p.strategy.kind));
  bin::put<float>(out, p.strategy.lambda);
  bin::put<std::uint64_t>(out, p.strategy.n_cands);
  bin::put<std::uint8_t>(out, p.strategy.is_strict ? 1 : 0);
  bin::put<std::uint64_t>(out, p.strategy.m);
  bin::put<std::uint8_t>(out, static_cast<std::uint8_t>(p.strategy.aggr));
  bin::put<std::uint8_t>(out, static_cast<std::uint8_t>(p.layout));
  bin::put<std::uint64_t>(out, p.kmeans_iters);
  bin::put<std::uint64_t>(out, p.seed);

  bin::put_vec(out, index.cq_.centroids());
  bin::put_vec(out, index.pq_.sub_centroids());
  index.lists_->write(out);

  const VectorSet live = index.store_.live();
  bin::put_vec(out, live.ids());
  bin::put_vec(out, live.data());
  if (!out) throw std::runtime_error("index write failed");
}

RairsIndex read_index(std::istream& in) {
  if (bin::get<std::uint64_t>(in) != kMagic) {
    throw FormatError("not a rairs index file (bad magic)");
  }
  const auto version = bin::get<std::uint32_t>(in);
  if (version != kVersion) {
    throw FormatError("unsupported index version " + std::to_string(version));
  }
  IndexParams p;
  const auto dim = bin::get<std::uint64_t>(in);
  p.nlist = bin::get<std::uint64_t>(in);
  p.block_size = bin::get<std::uint64_t>(in);
  p.pq_groups = bin::get<std::uint64_t>(in);
  p.nbits = bin::get<std::uint64_t>(in);
  const auto metric = bin::get<std::uint8_t>(in);
  const auto kind = bin::get<std::uint8_t>(in);
  if (metric > 1 || kind > static_cast<std::uint8_t>(StrategyKind::kAir)) {
    throw FormatError("index file: bad metric or strategy tag");
  }
  p.metric = static_cast<Metric>(metric);
  p.strategy.kind = static_cast<StrategyKind>(kind);
  p.strategy.lambda = bin::get<float>(in);
  p.strategy.n_cands = bin::get<std::uint64_t>(in);
  p.strategy.is_strict = bin::get<std::uint8_t>(in) != 0;
  p.strategy.m = bin::get<std::uint64_t>(in);
  const auto aggr = bin::get<std::uint8_t>(in);
  const auto layout = bin::get<std::uint8_t>(in);
  if (aggr > 2 || layout > 1) throw FormatError("index file: bad aggr or layout tag");
  p.strategy.aggr = static_cast<Aggregation>(aggr);
  p.layout = static_cast<LayoutKind>(layout);
  p.kmeans_iters = bin::get<std::uint64_t>(in);
  p.seed = bin::get<std::uint64_t>(in);

  auto centroids = bin::get_vec<float>(in);
  auto sub = bin::get_vec<float>(in);
  RairsIndex index(CoarseQuantizer(dim, p.metric, std::move(centroids)),
                   PQCodebook(dim, p.pq_groups, p.nbits, std::move(sub)), p);
  if (p.layout == LayoutKind::kSeil) {
    index.lists_ = std::make_unique<SeilLists>(SeilLists::read(in));
  } else {
    index.lists_ = std::make_unique<PlainLists>(PlainLists::read(in));
  }
  if (index.lists_->nlist() != p.nlist || index.lists_->block_size() != p.block_size) {
    throw FormatError("index file: list header disagrees with index header");
  }

  const auto ids = bin::get_vec<VecId>(in);
  const auto data = bin::get_vec<float>(in);
  if (data.size() != ids.size() * dim) throw FormatError("index file: bad refine store");
  for (std::size_t i = 0; i < ids.size(); ++i) {
    index.store_.add(data.data() + i * dim, ids[i]);
    if (!index.lists_->contains(ids[i])) {
      throw FormatError("index file: refine store holds an unindexed vector");
    }
  }
  if (ids.size() != index.lists_->num_vectors()) {
    throw FormatError("index file: refine store size disagrees with lists");
  }
  return index;
}

void RairsIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_index(*this, out);
}

RairsIndex RairsIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_index(in);
}

}  // namespace rairs
