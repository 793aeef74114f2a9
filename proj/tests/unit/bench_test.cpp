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

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "rairs/air_verify.hpp"
#include "test_util.hpp"

namespace rairs {
namespace {

SearchResults make_results(std::vector<std::vector<Neighbor>> rows) {
  SearchResults r;
  r.k = rows.empty() ? 0 : rows[0].size();
  r.neighbors = std::move(rows);
  r.stats.resize(r.neighbors.size());
  return r;
}

TEST(Recall, CountsIntersection) {
  GroundTruth gt;
  gt.k = 3;
  gt.ids = {1, 2, 3, 4, 5, 6};
  const auto res = make_results({{{1, 0}, {9, 0}, {3, 0}}, {{7, 0}, {8, 0}, {9, 0}}});
  const auto per = per_query_recall(res, gt, 3);
  EXPECT_DOUBLE_EQ(per[0], 2.0 / 3);
  EXPECT_DOUBLE_EQ(per[1], 0.0);
  EXPECT_DOUBLE_EQ(recall_at(res, gt, 3), 1.0 / 3);
  EXPECT_DOUBLE_EQ(recall_at(res, gt, 1), 0.5);
  EXPECT_THROW(recall_at(res, gt, 4), std::invalid_argument);
}

TEST(Recall, DistanceTiesCount) {
  GroundTruth gt;
  gt.k = 2;
  gt.ids = {1, 2};
  gt.distances = {0.5f, 1.0f};
  // ID 3 is at the same distance as the 2nd true neighbor.
  const auto res = make_results({{{1, 0.5f}, {3, 1.0f}}});
  EXPECT_DOUBLE_EQ(recall_at(res, gt, 2), 1.0);
}

TEST(Percentile, NearestRank) {
  std::vector<double> v;
  for (int i = 100; i >= 1; --i) v.push_back(i);
  EXPECT_DOUBLE_EQ(percentile(v, 0.95), 95);
  EXPECT_DOUBLE_EQ(percentile(v, 0.99), 99);
  EXPECT_DOUBLE_EQ(percentile(v, 1.0), 100);
  EXPECT_DOUBLE_EQ(percentile({7}, 0.5), 7);
}

TEST(BenchReport, CsvLayout) {
  BenchReport rep;
  SweepPoint p;
  p.label = "air";
  p.nprobe = 4;
  p.k = 10;
  p.recall = 0.5;
  p.scan_dco = 100;
  p.refine_dco = 50;
  p.qps = 1000;
  p.lat_mean_us = 2;
  p.query_recall = {1.0, 0.0};
  p.query_scan_dco = {90, 110};
  rep.points.push_back(p);
  p.nprobe = 8;
  p.recall = 0.95;
  p.lat_p95_us = 3;
  p.lat_p99_us = 4;
  rep.points.push_back(p);
  std::ostringstream out;
  rep.write_csv(out);
  EXPECT_EQ(out.str(),
            "strategy,nprobe,K,recall,scan_dco,refine_dco,qps,lat_mean_us,lat_p95_us,"
            "lat_p99_us\n"
            "air,4,10,0.5,100,50,1000,2,,\n"
            "air,8,10,0.95,100,50,1000,2,3,4\n");
  std::ostringstream cdf;
  rep.write_cdf(cdf, 0);
  EXPECT_EQ(cdf.str(), "query_id,recall,scan_dco\n0,1,90\n1,0,110\n");
  EXPECT_EQ(rep.first_reaching(0.9)->nprobe, 8u);
  EXPECT_EQ(rep.first_reaching(0.99), nullptr);
}

TEST(Sweep, DeterministicAndMonotone) {
  const VectorSet all = generate_synthetic(3100, 16, 40, 5, 0.08f);
  const VectorSet base = all.slice(0, 3000), qs = all.slice(3000, 3100).renumbered(0);
  IndexParams p;
  p.nlist = 32;
  p.pq_groups = 8;
  p.kmeans_iters = 8;
  RairsIndex idx = RairsIndex::train(base, p);
  idx.add(base);
  const GroundTruth gt = exact_knn(base, qs, 10, Metric::kL2);
  SweepOptions opt;
  opt.nprobes = {1, 2, 4, 8, 32};
  opt.one_at_a_time = true;
  const auto a = sweep(idx, qs, gt, opt);
  const auto b = sweep(idx, qs, gt, opt);
  ASSERT_EQ(a.points.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(a.points[i].recall, b.points[i].recall);
    EXPECT_EQ(a.points[i].scan_dco, b.points[i].scan_dco);
    EXPECT_TRUE(a.points[i].lat_p99_us.has_value());
    if (i) EXPECT_GE(a.points[i].scan_dco, a.points[i - 1].scan_dco);
  }
  EXPECT_GT(a.points.back().recall, 0.8);
}

TEST(AssignmentOverlap, IdenticalStrategiesOverlapFully) {
  const VectorSet data = generate_synthetic(2000, 8, 20, 1, 0.1f);
  const auto cq = CoarseQuantizer::train(data, 16, 8, 1);
  StrategyConfig s = parse_strategy("air-strict");
  StrategyConfig n = parse_strategy("naive");
  EXPECT_DOUBLE_EQ(assignment_overlap(cq, data, s, s), 1.0);
  const double o = assignment_overlap(cq, data, s, n);
  EXPECT_GT(o, 0.0);
  EXPECT_LT(o, 1.0);
  EXPECT_THROW(assignment_overlap(cq, data, parse_strategy("air"), s), std::invalid_argument);
}

// Adaptive Simpson quadrature as the independent reference.
double simpson(const std::function<double(double)>& f, double a, double b, double eps,
               double whole, double fa, double fb, double fm, int depth) {
  const double m = (a + b) / 2, lm = (a + m) / 2, rm = (m + b) / 2;
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15 * eps) {
    return left + right + (left + right - whole) / 15;
  }
  return simpson(f, a, m, eps / 2, left, fa, fm, flm, depth - 1) +
         simpson(f, m, b, eps / 2, right, fm, fb, frm, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  const double fa = f(a), fb = f(b), fm = f((a + b) / 2);
  return simpson(f, a, b, 1e-13, (b - a) / 6 * (fa + 4 * fm + fb), fa, fb, fm, 40);
}

TEST(SinPowerIntegral, MatchesQuadrature) {
  for (int d = 0; d <= 20; ++d) {
    const double q = integrate([d](double t) { return std::pow(std::sin(t), d); }, 0,
                               std::numbers::pi);
    EXPECT_NEAR(sin_power_integral(d), q, 1e-9) << "d=" << d;
  }
  EXPECT_DOUBLE_EQ(sin_power_integral(0), std::numbers::pi);
  EXPECT_DOUBLE_EQ(sin_power_integral(1), 2.0);
}

TEST(AirLambdaTheory, ClosedForm) {
  // D=2: 2 * (pi/2) * l / (3 |r|)
  EXPECT_NEAR(air_lambda_theory(2, 0.3, 0.5), 2 * (std::numbers::pi / 2) * 0.3 / 1.5, 1e-12);
}

TEST(Pearson, KnownValues) {
  const std::vector<double> a{1, 2, 3, 4}, b{2, 4, 6, 8}, c{4, 3, 2, 1};
  EXPECT_NEAR(pearson_correlation(a, b), 1.0, 1e-12);
  EXPECT_NEAR(pearson_correlation(a, c), -1.0, 1e-12);
}

TEST(VerifyAir, ProportionalInLowDimension) {
  std::mt19937_64 rng(3);
  std::normal_distribution<float> g;
  const int dim = 4;
  std::vector<float> x(dim), c(dim);
  for (auto& v : x) v = g(rng);
  for (int i = 0; i < dim; ++i) c[i] = x[i] + (i == 0 ? 0.4f : 0.f);
  std::vector<std::vector<float>> cands;
  for (int j = 0; j < 12; ++j) {
    std::vector<float> cp(dim);
    double n = 0;
    for (auto& v : cp) {
      v = g(rng);
      n += double(v) * v;
    }
    const double s = (1.0 + j / 12.0) / std::sqrt(n);
    for (int i = 0; i < dim; ++i) cp[i] = x[i] + float(cp[i] * s);
    cands.push_back(cp);
  }
  const auto r = verify_air(x, c, cands, 0.5, 50000, 9);
  EXPECT_GT(r.correlation, 0.99);
  EXPECT_LT(r.ratio_spread, 1.1);
  EXPECT_NEAR(r.fitted_ratio, r.expected_ratio, 0.05 * r.expected_ratio);
  // Same seed, same numbers.
  EXPECT_EQ(verify_air(x, c, cands, 0.5, 50000, 9).candidates[3].monte_carlo,
            r.candidates[3].monte_carlo);
}

}  // namespace
}  // namespace rairs
