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

#include "rairs/index.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <random>
#include <unordered_set>

#include "rairs/distance.hpp"
#include "rairs/parallel.hpp"
#include "rairs/plain_lists.hpp"

namespace rairs {

// ---------------------------------------------------------------------------
// RefineStore

const float* RefineStore::get(VecId id) const {
  auto it = row_of_.find(id);
  if (it == row_of_.end()) {
    throw IdError("refine store: unknown vector id " + std::to_string(id));
  }
  return data_.data() + it->second * dim_;
}

void RefineStore::add(const float* v, VecId id) {
  if (!row_of_.emplace(id, data_.size() / dim_).second) {
    throw IdError("refine store: duplicate vector id " + std::to_string(id));
  }
  data_.insert(data_.end(), v, v + dim_);
}

bool RefineStore::remove(VecId id) { return row_of_.erase(id) != 0; }

VectorSet RefineStore::live() const {
  std::vector<VecId> ids;
  ids.reserve(row_of_.size());
  for (const auto& kv : row_of_) ids.push_back(kv.first);
  std::sort(ids.begin(), ids.end());
  VectorSet out(dim_);
  for (VecId id : ids) out.append({get(id), dim_}, id);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void resolve_defaults(IndexParams& p, std::size_t dim, std::size_t ntrain) {
  if (p.nlist == 0) p.nlist = std::min(default_nlist(ntrain), ntrain);
  if (p.pq_groups == 0) p.pq_groups = std::max<std::size_t>(1, dim / 2);
  if (p.strategy.multiplicity() > 2) p.layout = LayoutKind::kPlain;
}

std::unique_ptr<InvertedLists> make_lists(const IndexParams& p) {
  if (p.layout == LayoutKind::kSeil) {
    return std::make_unique<SeilLists>(p.nlist, p.pq_groups, p.block_size);
  }
  return std::make_unique<PlainLists>(p.nlist, p.pq_groups, p.block_size);
}

VectorSet subsample(const VectorSet& data, std::size_t max_points,
                    std::uint64_t seed) {
  if (max_points == 0 || data.count() <= max_points) return data;
  std::vector<std::size_t> perm(data.count());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed ^ 0x5eed5eedULL);
  std::shuffle(perm.begin(), perm.end(), rng);
  perm.resize(max_points);
  std::sort(perm.begin(), perm.end());
  VectorSet out(data.dim());
  for (auto i : perm) out.append(data.row(i), data.id(i));
  return out;
}

}  // namespace

RairsIndex RairsIndex::train(const VectorSet& train_data, IndexParams params) {
  if (train_data.empty()) throw std::invalid_argument("train: no training data");
  resolve_defaults(params, train_data.dim(), train_data.count());
  params.strategy.validate(params.nlist);
  if (params.strategy.kind == StrategyKind::kSoarIp &&
      params.metric != Metric::kInnerProduct) {
    throw std::invalid_argument("strategy soar-ip requires the inner-product metric");
  }
  const VectorSet sample =
      subsample(train_data, params.max_train_points, params.seed);
  auto cq = CoarseQuantizer::train(sample, params.nlist, params.kmeans_iters,
                                   params.seed, params.metric);
  auto pq = PQCodebook::train(sample, params.pq_groups, params.nbits,
                              params.seed + 1, params.kmeans_iters);
  return RairsIndex(std::move(cq), std::move(pq), params);
}

RairsIndex::RairsIndex(CoarseQuantizer cq, PQCodebook pq, IndexParams params)
    : params_(params), cq_(std::move(cq)), pq_(std::move(pq)) {
  if (cq_.dim() != pq_.dim()) {
    throw DimensionMismatch("index: quantizer and codebook dims differ");
  }
  params_.nlist = cq_.nlist();
  params_.pq_groups = pq_.num_groups();
  params_.nbits = pq_.nbits();
  params_.metric = cq_.metric();
  if (params_.strategy.multiplicity() > 2) params_.layout = LayoutKind::kPlain;
  params_.strategy.validate(params_.nlist);
  if (params_.block_size == 0 || params_.block_size > kMaxBlockSize) {
    throw std::invalid_argument("index: block size must be in [1, 256]");
  }
  lists_ = make_lists(params_);
  store_ = RefineStore(cq_.dim());
}

const SeilLists* RairsIndex::seil() const {
  return dynamic_cast<const SeilLists*>(lists_.get());
}

void RairsIndex::add(const VectorSet& vecs, int num_threads) {
  if (vecs.empty()) return;
  if (vecs.dim() != dim()) {
    throw DimensionMismatch("add: vector dim " + std::to_string(vecs.dim()) +
                            " != index dim " + std::to_string(dim()));
  }
  vecs.validate();
  for (VecId id : vecs.ids()) {
    if (store_.contains(id)) {
      throw IdError("add: vector id " + std::to_string(id) + " already indexed");
    }
  }

  const std::size_t n = vecs.count();
  const std::size_t cs = pq_.code_size();
  std::vector<std::uint8_t> codes(n * cs);
  const StrategyConfig& st = params_.strategy;

  if (st.multiplicity() > 2) {
    std::vector<std::vector<ListId>> lists(n);
    parallel_for_chunks(n, num_threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        lists[i] = multi_assign(cq_, vecs.row_ptr(i), st);
        pq_.encode(vecs.row_ptr(i), codes.data() + i * cs);
      }
    });
    auto& plain = static_cast<PlainLists&>(*lists_);
    plain.insert(vecs.ids(), lists, codes);
  } else {
    std::vector<Assignment> assigns(n);
    parallel_for_chunks(n, num_threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        assigns[i] = assign_pair(cq_, vecs.row_ptr(i), st);
        assigns[i].vec_id = vecs.id(i);
        pq_.encode(vecs.row_ptr(i), codes.data() + i * cs);
      }
    });
    if (auto* s = dynamic_cast<SeilLists*>(lists_.get())) {
      s->insert(assigns, codes);
    } else {
      std::vector<std::vector<ListId>> lists(n);
      for (std::size_t i = 0; i < n; ++i) {
        lists[i] = assigns[i].single()
                       ? std::vector<ListId>{assigns[i].list1}
                       : std::vector<ListId>{assigns[i].list1, assigns[i].list2};
      }
      static_cast<PlainLists&>(*lists_).insert(vecs.ids(), lists, codes);
    }
  }
  for (std::size_t i = 0; i < n; ++i) store_.add(vecs.row_ptr(i), vecs.id(i));
}

void RairsIndex::check_search_args(const VectorSet& queries,
                                   const SearchParams& sp) const {
  if (queries.dim() != dim()) {
    throw DimensionMismatch("search: query dim " + std::to_string(queries.dim()) +
                            " != index dim " + std::to_string(dim()));
  }
  if (sp.k == 0 || sp.k > ntotal()) {
    throw std::invalid_argument("search: need 1 <= K <= ntotal (K=" +
                                std::to_string(sp.k) + ", ntotal=" +
                                std::to_string(ntotal()) + ")");
  }
  if (sp.nprobe == 0 || sp.nprobe > cq_.nlist()) {
    throw std::invalid_argument("search: need 1 <= nprobe <= nlist");
  }
}

std::vector<Neighbor> RairsIndex::refine(const float* q,
                                         std::span<const Candidate> cands,
                                         std::size_t k) const {
  TopK top(k);
  for (const Candidate& c : cands) {
    top.push(metric_score(params_.metric, q, store_.get(c.id), dim()), c.id);
  }
  std::vector<Neighbor> out;
  for (const Candidate& c : top.sorted()) {
    out.push_back({c.id, score_to_distance(params_.metric, c.score)});
  }
  return out;
}

SearchResults RairsIndex::search(const VectorSet& queries,
                                 const SearchParams& sp) const {
  check_search_args(queries, sp);
  SearchResults res;
  res.k = sp.k;
  res.neighbors.resize(queries.count());
  res.stats.resize(queries.count());
  const std::size_t big_k = sp.big_k();
  parallel_for_chunks(queries.count(), sp.num_threads,
                      [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const float* q = queries.row_ptr(i);
      const Lut lut = pq_.build_lut(q, params_.metric);
      const auto selected = cq_.find_nearest_lists(q, sp.nprobe);
      const auto cands = lists_->search(lut, selected, big_k, &res.stats[i].counters);
      res.stats[i].refine_dco = cands.size();
      res.neighbors[i] = refine(q, cands, sp.k);
    }
  });
  return res;
}

SearchResults RairsIndex::search_grouped(const VectorSet& queries,
                                         const SearchParams& sp) const {
  check_search_args(queries, sp);
  SearchResults res;
  res.k = sp.k;
  const std::size_t nq = queries.count();
  res.neighbors.resize(nq);
  res.stats.resize(nq);
  const std::size_t big_k = sp.big_k();
  std::atomic<std::size_t> switches{0};

  // Each thread handles a contiguous block of queries with its own tasks.
  parallel_for_chunks(nq, sp.num_threads, [&](std::size_t b, std::size_t e) {
    const std::size_t cnt = e - b;
    std::vector<Lut> luts(cnt);
    std::vector<QueryScratch> scratch(cnt);
    std::vector<std::pair<ListId, std::uint32_t>> tasks;
    tasks.reserve(cnt * sp.nprobe);
    for (std::size_t i = 0; i < cnt; ++i) {
      const float* q = queries.row_ptr(b + i);
      luts[i] = pq_.build_lut(q, params_.metric);
      scratch[i].reset(big_k);
      for (ListId l : cq_.find_nearest_lists(q, sp.nprobe)) {
        tasks.emplace_back(l, static_cast<std::uint32_t>(i));
      }
    }
    std::sort(tasks.begin(), tasks.end());
    std::size_t local_switches = 0;
    ListId current = 0;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      const auto [l, i] = tasks[t];
      if (t == 0 || l != current) {
        ++local_switches;
        current = l;
      }
      lists_->scan_list(luts[i], l, scratch[i]);
    }
    for (std::size_t i = 0; i < cnt; ++i) {
      const auto cands = scratch[i].heap.sorted();
      res.stats[b + i].counters = scratch[i].counters;
      res.stats[b + i].refine_dco = cands.size();
      res.neighbors[b + i] = refine(queries.row_ptr(b + i), cands, sp.k);
    }
    switches += local_switches;
  });
  res.list_switches = switches.load();
  return res;
}

DeleteReport RairsIndex::remove(std::span<const VecId> ids) {
  DeleteReport rep = lists_->remove(ids);
  for (VecId id : rep.deleted) store_.remove(id);
  return rep;
}

std::vector<Assignment> RairsIndex::pair_assignments() const {
  std::vector<Assignment> out;
  if (const SeilLists* s = seil()) {
    out.reserve(s->num_vectors());
    for (const auto& [id, e] : s->locations()) out.push_back({e.list1, e.list2, id});
  } else {
    if (params_.strategy.multiplicity() > 2) {
      throw std::logic_error("pair_assignments: index uses more than two lists per vector");
    }
    for (const VecId id : store_.live().ids()) {
      const auto ls = lists_->lists_of(id);
      out.push_back({ls.front(), ls.back(), id});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace rairs
