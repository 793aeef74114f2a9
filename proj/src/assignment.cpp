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

#include "rairs/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rairs/parallel.hpp"

namespace rairs {

void StrategyConfig::validate(std::size_t nlist) const {
  if (!(lambda >= 0.f) || !std::isfinite(lambda)) {
    throw std::invalid_argument("strategy: lambda must be a finite value >= 0");
  }
  if (kind == StrategyKind::kSingle) return;
  if (nlist < 2) {
    throw std::invalid_argument("strategy: redundant assignment needs nlist >= 2");
  }
  if (n_cands < 1) throw std::invalid_argument("strategy: n_cands must be >= 1");
  if (m < 2) throw std::invalid_argument("strategy: m must be >= 2");
  if (m > 2 && kind != StrategyKind::kAir) {
    throw std::invalid_argument("strategy: m > 2 is only defined for AIR");
  }
  if (m > 2 && !is_strict) {
    throw std::invalid_argument("strategy: m > 2 requires strict mode");
  }
  if (n_cands < m) {
    throw std::invalid_argument("strategy: n_cands (" + std::to_string(n_cands) +
                                ") must be >= m (" + std::to_string(m) + ")");
  }
  if (kind != StrategyKind::kNaive && n_cands > nlist) {
    throw std::invalid_argument("strategy: n_cands (" + std::to_string(n_cands) +
                                ") exceeds nlist (" + std::to_string(nlist) + ")");
  }
}

StrategyConfig parse_strategy(std::string_view name) {
  StrategyConfig cfg;
  if (name == "single") {
    cfg.kind = StrategyKind::kSingle;
    cfg.m = 1;
  } else if (name == "naive") {
    cfg.kind = StrategyKind::kNaive;
    cfg.is_strict = true;
  } else if (name == "soarl2") {
    cfg.kind = StrategyKind::kSoarL2;
    cfg.is_strict = true;
  } else if (name == "soar-ip") {
    cfg.kind = StrategyKind::kSoarIp;
    cfg.is_strict = true;
  } else if (name == "air") {
    cfg.kind = StrategyKind::kAir;
  } else if (name == "air-strict") {
    cfg.kind = StrategyKind::kAir;
    cfg.is_strict = true;
  } else if (name == "air-m") {
    cfg.kind = StrategyKind::kAir;
    cfg.is_strict = true;
    cfg.m = 3;
  } else {
    throw std::invalid_argument("unknown strategy: " + std::string(name));
  }
  return cfg;
}

std::string strategy_name(const StrategyConfig& cfg) {
  switch (cfg.kind) {
    case StrategyKind::kSingle: return "single";
    case StrategyKind::kNaive: return "naive";
    case StrategyKind::kSoarL2: return "soarl2";
    case StrategyKind::kSoarIp: return "soar-ip";
    case StrategyKind::kAir:
      if (cfg.m > 2) return "air-m";
      return cfg.is_strict ? "air-strict" : "air";
  }
  return "?";
}

std::string_view aggregation_name(Aggregation a) {
  switch (a) {
    case Aggregation::kMax: return "max";
    case Aggregation::kMin: return "min";
    case Aggregation::kAvg: return "avg";
  }
  return "?";
}

Aggregation parse_aggregation(std::string_view s) {
  if (s == "max") return Aggregation::kMax;
  if (s == "min") return Aggregation::kMin;
  if (s == "avg") return Aggregation::kAvg;
  throw std::invalid_argument("unknown aggregation: " + std::string(s));
}

// ---------------------------------------------------------------------------

namespace {

double sq_norm(std::span<const float> a) {
  double s = 0;
  for (float x : a) s += double(x) * double(x);
  return s;
}

double dot(std::span<const float> a, std::span<const float> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += double(a[i]) * double(b[i]);
  return s;
}

void residual(const CoarseQuantizer& cq, ListId c, const float* v,
              std::vector<float>& out) {
  const float* cent = cq.centroid(c);
  out.resize(cq.dim());
  for (std::size_t j = 0; j < cq.dim(); ++j) out[j] = cent[j] - v[j];
}

std::size_t effective_cands(const CoarseQuantizer& cq, const StrategyConfig& cfg) {
  return std::min(cfg.n_cands, cq.nlist());
}

// Index of the smallest loss in [start, end); the first one wins ties.
std::size_t argmin_from(const std::vector<double>& loss, std::size_t start) {
  std::size_t best = start;
  for (std::size_t i = start + 1; i < loss.size(); ++i) {
    if (loss[i] < loss[best]) best = i;
  }
  return best;
}

Assignment ordered(ListId a, ListId b) {
  return a <= b ? Assignment{a, b, 0} : Assignment{b, a, 0};
}

}  // namespace

double loss_naive(std::span<const float> r_prime) { return sq_norm(r_prime); }

std::optional<double> loss_soar(std::span<const float> r,
                                std::span<const float> r_prime, double lambda) {
  const double rn2 = sq_norm(r);
  if (rn2 == 0) return std::nullopt;
  const double proj = dot(r, r_prime);
  return sq_norm(r_prime) + lambda * (proj * proj / rn2);
}

double loss_air(std::span<const float> r, std::span<const float> r_prime,
                double lambda) {
  return sq_norm(r_prime) + lambda * dot(r, r_prime);
}

Assignment rair_assign(const CoarseQuantizer& cq, const float* v,
                       const StrategyConfig& cfg) {
  const std::size_t nc = effective_cands(cq, cfg);
  const auto cands = cq.find_nearest_lists(v, nc);
  if (cfg.is_strict && cands.size() < 2) {
    throw std::invalid_argument("rair_assign: strict mode needs >= 2 candidates");
  }
  std::vector<float> r0, r;
  residual(cq, cands[0], v, r0);
  std::vector<double> loss(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) {
    residual(cq, cands[i], v, r);
    loss[i] = loss_air(r0, r, cfg.lambda);
  }
  const std::size_t pick = argmin_from(loss, cfg.is_strict ? 1 : 0);
  return ordered(cands[0], cands[pick]);
}

Assignment assign_pair(const CoarseQuantizer& cq, const float* v,
                       const StrategyConfig& cfg) {
  switch (cfg.kind) {
    case StrategyKind::kSingle: {
      const ListId c = cq.find_nearest_lists(v, 1)[0];
      return {c, c, 0};
    }
    case StrategyKind::kAir:
      return rair_assign(cq, v, cfg);
    case StrategyKind::kNaive:
    case StrategyKind::kSoarL2:
    case StrategyKind::kSoarIp:
      break;
  }
  const std::size_t nc = std::max<std::size_t>(2, effective_cands(cq, cfg));
  const auto cands = cq.find_nearest_lists(v, nc);
  if (cands.size() < 2) {
    throw std::invalid_argument("assign_pair: redundant assignment needs nlist >= 2");
  }
  std::vector<float> r0, r;
  residual(cq, cands[0], v, r0);
  const bool soar = cfg.kind != StrategyKind::kNaive && sq_norm(r0) > 0;
  std::vector<double> loss(cands.size());
  for (std::size_t i = 1; i < cands.size(); ++i) {
    residual(cq, cands[i], v, r);
    loss[i] = soar ? *loss_soar(r0, r, cfg.lambda) : loss_naive(r);
  }
  return ordered(cands[0], cands[argmin_from(loss, 1)]);
}

std::vector<ListId> multi_assign(const CoarseQuantizer& cq, const float* v,
                                 const StrategyConfig& cfg) {
  const std::size_t nc = effective_cands(cq, cfg);
  if (cfg.m < 2 || cfg.m > nc) {
    throw std::invalid_argument("multi_assign: need 2 <= m <= n_cands");
  }
  const auto cands = cq.find_nearest_lists(v, nc);
  std::vector<std::vector<float>> res(cands.size());
  std::vector<double> norm2(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) {
    residual(cq, cands[i], v, res[i]);
    norm2[i] = sq_norm(res[i]);
  }
  std::vector<bool> taken(cands.size(), false);
  std::vector<std::size_t> chosen{0};
  taken[0] = true;
  while (chosen.size() < cfg.m) {
    std::size_t best = cands.size();
    double best_loss = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (taken[i]) continue;
      double agg = 0;
      for (std::size_t k = 0; k < chosen.size(); ++k) {
        const double d = dot(res[chosen[k]], res[i]);
        if (k == 0) {
          agg = d;
        } else if (cfg.aggr == Aggregation::kMax) {
          agg = std::max(agg, d);
        } else if (cfg.aggr == Aggregation::kMin) {
          agg = std::min(agg, d);
        } else {
          agg += d;
        }
      }
      if (cfg.aggr == Aggregation::kAvg) agg /= double(chosen.size());
      const double l = norm2[i] + cfg.lambda * agg;
      if (l < best_loss) {
        best_loss = l;
        best = i;
      }
    }
    taken[best] = true;
    chosen.push_back(best);
  }
  std::vector<ListId> out;
  for (auto i : chosen) out.push_back(cands[i]);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Assignment> assign_all(const CoarseQuantizer& cq,
                                   const VectorSet& data,
                                   const StrategyConfig& cfg, int num_threads) {
  if (data.dim() != cq.dim()) {
    throw DimensionMismatch("assign_all: data dim != quantizer dim");
  }
  std::vector<Assignment> out(data.count());
  parallel_for_chunks(data.count(), num_threads,
                      [&](std::size_t b, std::size_t e) {
                        for (std::size_t i = b; i < e; ++i) {
                          out[i] = assign_pair(cq, data.row_ptr(i), cfg);
                          out[i].vec_id = data.id(i);
                        }
                      });
  return out;
}

}  // namespace rairs
