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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>

#include "rairs/air_verify.hpp"
#include "rairs/bench.hpp"
#include "rairs/index.hpp"
#include "rairs/plain_lists.hpp"

namespace {

using namespace rairs;
using Clock = std::chrono::steady_clock;

int g_failed = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s  %2d  %-34s %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failed;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// 10k x 16 clustered set shared by several criteria.
struct SmallSet {
  VectorSet base, queries;
  SmallSet() {
    const VectorSet all = generate_synthetic(10200, 16, 100, 11, 0.2f);
    base = all.slice(0, 10000);
    queries = all.slice(10000, 10200).renumbered(0);
  }
};

const SmallSet& small_set() {
  static const SmallSet s;
  return s;
}

IndexParams small_params(const char* strategy) {
  IndexParams p;
  p.strategy = parse_strategy(strategy);
  p.pq_groups = 8;
  return p;
}

// ---------------------------------------------------------------------------

void exhaustive_reduction() {
  const auto t0 = Clock::now();
  const SmallSet& d = small_set();
  RairsIndex idx = RairsIndex::train(d.base, small_params("air"));
  idx.add(d.base);
  const VectorSet qs = d.queries.slice(0, 100);
  SearchParams sp;
  sp.k = 10;
  sp.nprobe = idx.params().nlist;
  sp.k_factor = (d.base.count() + sp.k - 1) / sp.k;  // bigK >= n
  const SearchResults res = idx.search(qs, sp);
  const GroundTruth gt = exact_knn(d.base, qs, 10, Metric::kL2);
  std::size_t mismatches = 0;
  for (std::size_t q = 0; q < qs.count(); ++q) {
    for (std::size_t i = 0; i < 10; ++i) {
      if (i >= res.neighbors[q].size() || res.neighbors[q][i].id != gt.ids[q * 10 + i]) {
        ++mismatches;
      }
    }
  }
  const double secs = seconds_since(t0);
  report(1, "exhaustive reduction", mismatches == 0 && secs < 10,
         fmt("recall=%.4f mismatched_ids=%.0f time=%.2fs", recall_at(res, gt, 10),
             double(mismatches), secs));
}

// Duplicated layout scanned copy by copy, deduplicated afterwards.
struct DupScan {
  std::map<VecId, float> unique;
  std::size_t copies = 0;
};

DupScan scan_duplicated(const PlainLists& plain, const Lut& lut,
                        const std::vector<ListId>& probe) {
  DupScan out;
  std::vector<ScanHit> hits;
  for (ListId l : probe) {
    const BlockArray& blocks = plain.blocks(l);
    for (std::size_t b = 0; b < blocks.num_blocks(); ++b) {
      hits.clear();
      out.copies += scan_block(lut, blocks.block(b), hits);
      for (const auto& h : hits) out.unique[h.stored_id] = h.distance;
    }
  }
  return out;
}

void seil_equivalence_and_dco() {
  const SmallSet& d = small_set();
  // Few, long lists so that many two-list cells fill whole blocks.
  IndexParams p = small_params("air");
  p.nlist = 16;
  RairsIndex seil = RairsIndex::train(d.base, p);
  p = seil.params();
  p.layout = LayoutKind::kPlain;
  RairsIndex dup(seil.quantizer(), seil.codebook(), p);
  seil.add(d.base);
  dup.add(d.base);
  const auto& plain = dynamic_cast<const PlainLists&>(dup.lists());
  const auto shared = seil.seil()->shared_items_per_cell();

  std::size_t set_mismatch = 0, topk_mismatch = 0, dco_mismatch = 0, checks = 0;
  std::size_t saved = 0, total = 0;
  for (std::size_t nprobe : {1u, 4u, 16u}) {
    for (std::size_t q = 0; q < d.queries.count(); ++q) {
      const float* x = d.queries.row_ptr(q);
      const Lut lut = seil.codebook().build_lut(x, Metric::kL2);
      const auto probe = seil.quantizer().find_nearest_lists(x, nprobe);

      SearchCounters c;
      const auto all = seil.lists().search(lut, probe, d.base.count(), &c);
      const DupScan ref = scan_duplicated(plain, lut, probe);
      std::map<VecId, float> got;
      for (const auto& cand : all) got[cand.id] = cand.score;
      if (got != ref.unique || got.size() != all.size()) ++set_mismatch;

      // Top bigK from the heap equals the first bigK of the sorted oracle.
      const auto top = seil.lists().search(lut, probe, 100);
      std::vector<std::pair<float, VecId>> sorted;
      for (const auto& [id, dist] : ref.unique) sorted.emplace_back(dist, id);
      std::sort(sorted.begin(), sorted.end());
      sorted.resize(std::min<std::size_t>(sorted.size(), 100));
      bool same = top.size() == sorted.size();
      for (std::size_t i = 0; same && i < top.size(); ++i) {
        same = top[i].id == sorted[i].second && top[i].score == sorted[i].first;
      }
      if (!same) ++topk_mismatch;

      const std::set<ListId> probed(probe.begin(), probe.end());
      std::size_t both = 0;
      for (const auto& [cell, n] : shared) {
        if (probed.count(cell.first) && probed.count(cell.second)) both += n;
      }
      if (c.scan_dco != ref.copies - both) ++dco_mismatch;
      saved += ref.copies - c.scan_dco;
      total += ref.copies;
      ++checks;
    }
  }
  report(2, "SEIL equivalence oracle", set_mismatch == 0 && topk_mismatch == 0,
         fmt("instances=%.0f set_mismatches=%.0f topK_mismatches=%.0f", double(checks),
             double(set_mismatch), double(topk_mismatch)));
  report(3, "DCO accounting identity", dco_mismatch == 0 && saved > 0,
         fmt("instances=%.0f mismatches=%.0f shared_savings=%.2f%%", double(checks),
             double(dco_mismatch), total ? 100.0 * double(saved) / double(total) : 0.0));
}

std::vector<float> offset_point(std::mt19937_64& rng, const std::vector<float>& x,
                                double norm) {
  std::normal_distribution<double> g(0, 1);
  std::vector<double> dir(x.size());
  double n2 = 0;
  for (auto& v : dir) {
    v = g(rng);
    n2 += v * v;
  }
  std::vector<float> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = x[i] + static_cast<float>(dir[i] * norm / std::sqrt(n2));
  }
  return out;
}

void theorem_check() {
  const auto t0 = Clock::now();
  const int dim = 8;
  std::mt19937_64 rng(2024);
  std::normal_distribution<float> g(0.f, 1.f);
  std::vector<float> x(dim);
  for (auto& v : x) v = g(rng);
  std::uniform_real_distribution<double> r_norm(0.1, 1.0), rp_norm(1.0, 2.0);
  const std::vector<float> c = offset_point(rng, x, r_norm(rng));
  // Candidates sit farther from x than the primary centroid does.
  std::vector<std::vector<float>> cands;
  for (int j = 0; j < 50; ++j) cands.push_back(offset_point(rng, x, rp_norm(rng)));
  const AirVerifyResult r = verify_air(x, c, cands, 0.5, 100000, 7);
  const double secs = seconds_since(t0);
  report(4, "AIR loss proportionality",
         r.correlation >= 0.99 && r.ratio_spread <= 1.10 && secs < 60,
         fmt("corr=%.6f spread=%.4f", r.correlation, r.ratio_spread) +
             fmt(" |r|=%.3f fitted/expected=%.4f time=%.2fs", r.r_norm,
                 r.fitted_ratio / r.expected_ratio, secs));
}

void sin_power_recurrence() {
  double worst = 0;
  const int n = 200000;  // composite Simpson, even interval count
  for (int d = 0; d <= 20; ++d) {
    const double h = std::numbers::pi / n;
    double s = 0;
    for (int i = 0; i <= n; ++i) {
      const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
      s += w * std::pow(std::sin(i * h), d);
    }
    worst = std::max(worst, std::abs(s * h / 3 - sin_power_integral(d)));
  }
  report(5, "sin-power integral recurrence", worst <= 1e-9,
         fmt("max_abs_err=%.3g over D=0..20", worst));
}

void degeneration() {
  const SmallSet& d = small_set();
  const auto cq = CoarseQuantizer::train(d.base, 128, 25, 3);
  StrategyConfig air = parse_strategy("air-strict");
  air.lambda = 0;
  const StrategyConfig naive = parse_strategy("naive");
  const auto a = assign_all(cq, d.base, air);
  const auto b = assign_all(cq, d.base, naive);
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += !(a[i] == b[i]);
  report(6, "AIR(lambda=0) equals NaiveRA", diff == 0,
         fmt("vectors=%.0f differing=%.0f", double(a.size()), double(diff)));
}

// First sweep point at or above the target, or null.
const SweepPoint* first_at(const BenchReport& r, double target) {
  return r.first_reaching(target);
}

void directional_checks() {
  const auto t0 = Clock::now();
  const VectorSet all = generate_synthetic(50500, 32, 2000, 5, 0.2f);
  const VectorSet base = all.slice(0, 50000);
  const VectorSet queries = all.slice(50000, 50500).renumbered(0);
  IndexParams p;
  p.nlist = 256;
  p.pq_groups = 16;
  p.seed = 5;
  const RairsIndex proto = RairsIndex::train(base, p);
  const GroundTruth gt = exact_knn(base, queries, 10, Metric::kL2);

  SweepOptions opt;
  opt.k = 10;
  // Unit steps at the low end so the crossing point is not a grid artifact.
  opt.nprobes.clear();
  for (std::size_t np = 1; np <= 32; ++np) opt.nprobes.push_back(np);
  for (std::size_t np : {40, 48, 64, 96, 128}) opt.nprobes.push_back(np);
  std::map<std::string, BenchReport> reps;
  for (const char* name : {"single", "air", "air-strict"}) {
    IndexParams pi = proto.params();
    pi.strategy = parse_strategy(name);
    RairsIndex idx(proto.quantizer(), proto.codebook(), pi);
    idx.add(base);
    opt.label = name;
    reps[name] = sweep(idx, queries, gt, opt);
  }
  const SweepPoint* base_pt = first_at(reps["single"], 0.9);
  const SweepPoint* rairs_pt = first_at(reps["air"], 0.9);
  const SweepPoint* srairs_pt = first_at(reps["air-strict"], 0.9);
  const double secs = seconds_since(t0);
  if (!base_pt || !rairs_pt || !srairs_pt) {
    report(7, "RAIRS DCO benefit", false, "recall 0.9 not reached by every strategy");
    report(8, "SRAIRS nprobe compression", false, "recall 0.9 not reached by every strategy");
    return;
  }
  const double dco_ratio = rairs_pt->scan_dco / base_pt->scan_dco;
  report(7, "RAIRS DCO benefit", dco_ratio <= 0.95,
         fmt("scan_dco single=%.1f (nprobe %.0f) ", base_pt->scan_dco, double(base_pt->nprobe)) +
             fmt("RAIRS=%.1f (nprobe %.0f) ratio=%.3f", rairs_pt->scan_dco,
                 double(rairs_pt->nprobe), dco_ratio));
  const double np_ratio = double(srairs_pt->nprobe) / double(base_pt->nprobe);
  report(8, "SRAIRS nprobe compression", np_ratio <= 0.7,
         fmt("nprobe single=%.0f SRAIRS=%.0f ratio=%.3f", double(base_pt->nprobe),
             double(srairs_pt->nprobe), np_ratio) +
             fmt(" (sweeps took %.1fs)", secs));
}

void scan_exactness() {
  std::mt19937_64 rng(99);
  const std::size_t groups = 16, ksub = 16, bs = 32;
  std::uniform_real_distribution<float> u(-5.f, 20.f);
  std::size_t mismatches = 0, checked = 0;
  for (int b = 0; b < 1000; ++b) {
    Lut lut;
    lut.num_groups = groups;
    lut.ksub = ksub;
    for (std::size_t i = 0; i < groups * ksub; ++i) lut.table.push_back(u(rng));
    std::vector<std::uint8_t> codes(groups * bs);
    std::vector<std::uint64_t> ids(bs);
    for (auto& c : codes) c = static_cast<std::uint8_t>(rng() % ksub);
    for (std::size_t s = 0; s < bs; ++s) ids[s] = rng() % 5 == 0 ? kInvalidStoredId : s;
    const BlockView view{groups, bs, codes.data(), ids.data()};
    std::vector<ScanHit> hits;
    scan_block(lut, view, hits);
    std::size_t h = 0;
    for (std::size_t s = 0; s < bs; ++s) {
      if (ids[s] == kInvalidStoredId) continue;
      float acc = 0.f;
      for (std::size_t m = 0; m < groups; ++m) acc += lut.table[m * ksub + codes[m * bs + s]];
      if (h >= hits.size() || hits[h].stored_id != s || hits[h].distance != acc) ++mismatches;
      ++h;
      ++checked;
    }
    if (h != hits.size()) ++mismatches;
  }
  report(9, "scan exactness", mismatches == 0,
         fmt("blocks=1000 slots=%.0f mismatches=%.0f", double(checked), double(mismatches)));
}

bool same_results(const SearchResults& a, const SearchResults& b) {
  if (a.num_queries() != b.num_queries()) return false;
  for (std::size_t q = 0; q < a.num_queries(); ++q) {
    if (a.neighbors[q].size() != b.neighbors[q].size()) return false;
    for (std::size_t i = 0; i < a.neighbors[q].size(); ++i) {
      if (a.neighbors[q][i].id != b.neighbors[q][i].id ||
          a.neighbors[q][i].distance != b.neighbors[q][i].distance) {
        return false;
      }
    }
  }
  return true;
}

void insert_delete_integrity() {
  const SmallSet& d = small_set();
  const IndexParams p0 = small_params("air");
  RairsIndex one = RairsIndex::train(d.base, p0);
  const IndexParams p = one.params();
  RairsIndex two(one.quantizer(), one.codebook(), p);
  one.add(d.base);
  two.add(d.base.slice(0, 6000));
  two.add(d.base.slice(6000, 10000));
  bool membership = one.pair_assignments() == two.pair_assignments();

  const std::vector<std::size_t> nprobes{1, 2, 4, 8, 16, 32, 64, 128};
  bool results = true;
  for (auto np : nprobes) {
    SearchParams sp;
    sp.nprobe = np;
    results = results && same_results(one.search(d.queries, sp), two.search(d.queries, sp));
  }

  // Delete 10% of the IDs.
  std::vector<VecId> ids(d.base.ids());
  std::mt19937_64 rng(77);
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.resize(ids.size() / 10);
  const DeleteReport rep = one.remove(ids);
  const std::set<VecId> gone(ids.begin(), ids.end());
  VectorSet survivors(d.base.dim());
  for (std::size_t i = 0; i < d.base.count(); ++i) {
    if (!gone.count(d.base.id(i))) survivors.append(d.base.row(i), d.base.id(i));
  }
  const GroundTruth gt = exact_knn(survivors, d.queries, 10, Metric::kL2);
  RairsIndex rebuilt = RairsIndex::train(survivors, p0);
  rebuilt.add(survivors);

  SweepOptions opt;
  opt.nprobes = nprobes;
  const BenchReport after = sweep(one, d.queries, gt, opt);
  const BenchReport fresh = sweep(rebuilt, d.queries, gt, opt);
  std::size_t leaked = 0;
  for (auto np : nprobes) {
    SearchParams sp;
    sp.nprobe = np;
    for (const auto& row : one.search_grouped(d.queries, sp).neighbors) {
      for (const auto& n : row) leaked += gone.count(n.id);
    }
  }
  double worst = 0;
  for (std::size_t i = 0; i < nprobes.size(); ++i) {
    worst = std::max(worst, std::abs(after.points[i].recall - fresh.points[i].recall));
  }
  const bool ok = membership && results && rep.deleted.size() == ids.size() && leaked == 0 &&
                  worst <= 0.02;
  report(10, "insert/delete integrity", ok,
         std::string("membership=") + (membership ? "equal" : "DIFFER") +
             " results=" + (results ? "equal" : "DIFFER") +
             fmt(" deleted=%.0f leaked=%.0f max_recall_gap=%.4f", double(rep.deleted.size()),
                 double(leaked), worst));
}

void grouped_equivalence() {
  const SmallSet& d = small_set();
  RairsIndex idx = RairsIndex::train(d.base, small_params("air"));
  idx.add(d.base);
  bool ok = true;
  std::size_t switches = 0, tasks = 0;
  for (std::size_t np : {1u, 4u, 16u}) {
    SearchParams sp;
    sp.nprobe = np;
    sp.num_threads = 2;
    const SearchResults g = idx.search_grouped(d.queries, sp);
    sp.num_threads = 1;
    ok = ok && same_results(g, idx.search(d.queries, sp));
    switches += g.list_switches;
    tasks += np * d.queries.count();
  }
  report(11, "grouped equals one-at-a-time", ok,
         fmt("queries=200 list_switches=%.0f of %.0f tasks", double(switches), double(tasks)));
}

void multi_assign_reduction() {
  const SmallSet& d = small_set();
  const auto cq = CoarseQuantizer::train(d.base, 128, 25, 4);
  StrategyConfig cfg = parse_strategy("air-strict");
  cfg.m = 2;
  std::size_t diff = 0;
  for (std::size_t i = 0; i < d.base.count(); ++i) {
    const Assignment a = rair_assign(cq, d.base.row_ptr(i), cfg);
    const auto m = multi_assign(cq, d.base.row_ptr(i), cfg);
    diff += !(m.size() == 2 && m[0] == a.list1 && m[1] == a.list2);
  }
  report(12, "multi_assign(m=2) equals SRAIR", diff == 0,
         fmt("vectors=%.0f differing=%.0f", double(d.base.count()), double(diff)));
}

void guarded(const std::function<void()>& f, int first_id, int count) {
  try {
    f();
  } catch (const std::exception& e) {
    for (int i = 0; i < count; ++i) {
      report(first_id + i, "(exception)", false, e.what());
    }
  }
}

}  // namespace

int main() {
  guarded(exhaustive_reduction, 1, 1);
  guarded(seil_equivalence_and_dco, 2, 2);
  guarded(theorem_check, 4, 1);
  guarded(sin_power_recurrence, 5, 1);
  guarded(degeneration, 6, 1);
  guarded(directional_checks, 7, 2);
  guarded(scan_exactness, 9, 1);
  guarded(insert_delete_integrity, 10, 1);
  guarded(grouped_equivalence, 11, 1);
  guarded(multi_assign_reduction, 12, 1);
  std::printf("%d of 12 criteria failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
