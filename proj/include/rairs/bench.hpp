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
#include <optional>
#include <string>
#include <vector>

#include "rairs/assignment.hpp"
#include "rairs/dataset.hpp"
#include "rairs/index.hpp"

namespace rairs {

/// Per-query recall k@K (k = K): |result top-K ∩ truth top-K| / K. When the
/// truth carries distances, a result whose exact distance equals the K-th
/// true distance also counts, so distance ties do not cost recall.
std::vector<double> per_query_recall(const SearchResults& results,
                                     const GroundTruth& gt, std::size_t k);
double recall_at(const SearchResults& results, const GroundTruth& gt,
                 std::size_t k);

struct SweepOptions {
  std::string label = "index";
  std::size_t k = 10;
  std::size_t k_factor = 0;
  std::vector<std::size_t> nprobes{1, 2, 4, 8, 16, 32};
  int num_threads = 1;
  /// Also time every query on its own to get latency percentiles.
  bool one_at_a_time = false;
};

struct SweepPoint {
  std::string label;
  std::size_t nprobe = 0;
  std::size_t k = 0;
  double recall = 0;
  double scan_dco = 0;    // mean per query
  double refine_dco = 0;  // mean per query
  double qps = 0;
  double lat_mean_us = 0;
  std::optional<double> lat_p95_us;
  std::optional<double> lat_p99_us;
  std::vector<double> query_recall;
  std::vector<std::size_t> query_scan_dco;
};

struct BenchReport {
  std::vector<SweepPoint> points;

  static constexpr const char* kCsvHeader =
      "strategy,nprobe,K,recall,scan_dco,refine_dco,qps,lat_mean_us,"
      "lat_p95_us,lat_p99_us";

  void write_csv(std::ostream& out, bool header = true) const;
  /// `query_id,recall,scan_dco` for one sweep point.
  void write_cdf(std::ostream& out, std::size_t point) const;
  /// First point whose recall reaches `target`, if any.
  const SweepPoint* first_reaching(double target) const;
};

/// Runs grouped batch search for every nprobe in `opt.nprobes`.
BenchReport sweep(const RairsIndex& index, const VectorSet& queries,
                  const GroundTruth& gt, const SweepOptions& opt);

/// Share of vectors for which two strict two-way strategies pick the same
/// pair of lists.
double assignment_overlap(const CoarseQuantizer& cq, const VectorSet& data,
                          const StrategyConfig& a, const StrategyConfig& b,
                          int num_threads = 1);

/// Nearest-rank percentile: smallest value p with at least a q share of `values` <= p.
double percentile(std::vector<double> values, double q);

}  // namespace rairs
