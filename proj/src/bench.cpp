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

#include "rairs/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <unordered_set>

namespace rairs {

std::vector<double> per_query_recall(const SearchResults& results,
                                     const GroundTruth& gt, std::size_t k) {
  if (results.num_queries() != gt.num_queries()) {
    throw std::invalid_argument("recall: " + std::to_string(results.num_queries()) +
                                " result rows vs " +
                                std::to_string(gt.num_queries()) + " truth rows");
  }
  if (k == 0 || k > gt.k) {
    throw std::invalid_argument("recall: K must be in [1, ground-truth K]");
  }
  std::vector<double> out(results.num_queries());
  for (std::size_t q = 0; q < results.num_queries(); ++q) {
    const auto truth = gt.ids_of(q).subspan(0, k);
    const std::unordered_set<VecId> want(truth.begin(), truth.end());
    const bool ties = gt.has_distances();
    const float kth = ties ? gt.distances[q * gt.k + k - 1] : 0.f;
    const auto& got = results.neighbors[q];
    std::size_t hits = 0;
    for (std::size_t i = 0; i < std::min(k, got.size()); ++i) {
      if (want.count(got[i].id) || (ties && got[i].distance == kth)) ++hits;
    }
    out[q] = double(std::min(hits, k)) / double(k);
  }
  return out;
}

double recall_at(const SearchResults& results, const GroundTruth& gt,
                 std::size_t k) {
  const auto per = per_query_recall(results, gt, k);
  if (per.empty()) return 0;
  double s = 0;
  for (double v : per) s += v;
  return s / double(per.size());
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  const auto idx = static_cast<std::size_t>(
      std::ceil(q * double(values.size())) - 1);
  return values[std::min(values.size() - 1, idx)];
}

void BenchReport::write_csv(std::ostream& out, bool header) const {
  if (header) out << kCsvHeader << '\n';
  for (const auto& p : points) {
    out << p.label << ',' << p.nprobe << ',' << p.k << ',' << p.recall << ','
        << p.scan_dco << ',' << p.refine_dco << ',' << p.qps << ','
        << p.lat_mean_us << ',';
    if (p.lat_p95_us) out << *p.lat_p95_us;
    out << ',';
    if (p.lat_p99_us) out << *p.lat_p99_us;
    out << '\n';
  }
}

void BenchReport::write_cdf(std::ostream& out, std::size_t point) const {
  const SweepPoint& p = points.at(point);
  out << "query_id,recall,scan_dco\n";
  for (std::size_t q = 0; q < p.query_recall.size(); ++q) {
    out << q << ',' << p.query_recall[q] << ',' << p.query_scan_dco[q] << '\n';
  }
}

const SweepPoint* BenchReport::first_reaching(double target) const {
  for (const auto& p : points) {
    if (p.recall >= target) return &p;
  }
  return nullptr;
}

BenchReport sweep(const RairsIndex& index, const VectorSet& queries,
                  const GroundTruth& gt, const SweepOptions& opt) {
  using Clock = std::chrono::steady_clock;
  BenchReport rep;
  for (std::size_t nprobe : opt.nprobes) {
    SearchParams sp;
    sp.k = opt.k;
    sp.k_factor = opt.k_factor;
    sp.nprobe = nprobe;
    sp.num_threads = opt.num_threads;

    const auto t0 = Clock::now();
    const SearchResults res = index.search_grouped(queries, sp);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();

    SweepPoint p;
    p.label = opt.label;
    p.nprobe = nprobe;
    p.k = opt.k;
    p.query_recall = per_query_recall(res, gt, opt.k);
    const double nq = double(std::max<std::size_t>(1, queries.count()));
    for (double r : p.query_recall) p.recall += r;
    p.recall /= nq;
    for (const auto& st : res.stats) {
      p.query_scan_dco.push_back(st.counters.scan_dco);
      p.scan_dco += double(st.counters.scan_dco);
      p.refine_dco += double(st.refine_dco);
    }
    p.scan_dco /= nq;
    p.refine_dco /= nq;
    p.qps = secs > 0 ? double(queries.count()) / secs : 0;
    p.lat_mean_us = secs * 1e6 / nq;

    if (opt.one_at_a_time) {
      SearchParams one = sp;
      one.num_threads = 1;
      std::vector<double> lat;
      lat.reserve(queries.count());
      for (std::size_t i = 0; i < queries.count(); ++i) {
        const VectorSet q = queries.slice(i, i + 1);
        const auto s0 = Clock::now();
        (void)index.search(q, one);
        lat.push_back(std::chrono::duration<double, std::micro>(Clock::now() - s0).count());
      }
      double mean = 0;
      for (double v : lat) mean += v;
      p.lat_mean_us = lat.empty() ? 0 : mean / double(lat.size());
      p.lat_p95_us = percentile(lat, 0.95);
      p.lat_p99_us = percentile(lat, 0.99);
    }
    rep.points.push_back(std::move(p));
  }
  return rep;
}

double assignment_overlap(const CoarseQuantizer& cq, const VectorSet& data,
                          const StrategyConfig& a, const StrategyConfig& b,
                          int num_threads) {
  for (const auto* s : {&a, &b}) {
    if (s->kind == StrategyKind::kSingle || !s->is_strict || s->m != 2) {
      throw std::invalid_argument(
          "assignment_overlap: both strategies must be strict two-way");
    }
  }
  if (data.empty()) return 0;
  const auto pa = assign_all(cq, data, a, num_threads);
  const auto pb = assign_all(cq, data, b, num_threads);
  std::size_t same = 0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    // The primary list is the nearest centroid for both, so equal pairs
    // means equal second choices.
    if (pa[i].list1 == pb[i].list1 && pa[i].list2 == pb[i].list2) ++same;
  }
  return double(same) / double(pa.size());
}

}  // namespace rairs
