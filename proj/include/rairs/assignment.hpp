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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rairs/coarse_quantizer.hpp"
#include "rairs/common.hpp"
#include "rairs/dataset.hpp"

namespace rairs {

/// The (ordered) pair of lists a vector is stored in. list1 == list2 means
/// the vector lives in a single list.
struct Assignment {
  ListId list1 = 0;
  ListId list2 = 0;
  VecId vec_id = 0;

  bool single() const { return list1 == list2; }
  friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

enum class StrategyKind {
  kSingle,  // nearest list only
  kNaive,   // two nearest lists
  kSoarL2,  // orthogonality-penalized spill, Euclidean candidates
  kSoarIp,  // same loss, inner-product candidates
  kAir,     // amplified inverse residual
};

enum class Aggregation { kMax, kMin, kAvg };

struct StrategyConfig {
  StrategyKind kind = StrategyKind::kAir;
  float lambda = 0.5f;
  std::size_t n_cands = 10;
  /// AIR only: exclude the primary list from the second choice.
  bool is_strict = false;
  /// AIR only: number of lists per vector (>= 3 disables the shared layout).
  std::size_t m = 2;
  Aggregation aggr = Aggregation::kMax;

  /// Lists per vector (upper bound; non-strict AIR may use one).
  std::size_t multiplicity() const {
    return kind == StrategyKind::kSingle ? 1 : m;
  }
  void validate(std::size_t nlist) const;
};

/// Names accepted on the command line: single, naive, soarl2, soar-ip, air,
/// air-strict, air-m.
StrategyConfig parse_strategy(std::string_view name);
std::string strategy_name(const StrategyConfig& cfg);
std::string_view aggregation_name(Aggregation a);
Aggregation parse_aggregation(std::string_view s);

// Losses over residuals r = c - x (primary) and r' = c' - x (candidate).

double loss_naive(std::span<const float> r_prime);
/// Empty when ||r|| == 0, where the projection term is undefined.
std::optional<double> loss_soar(std::span<const float> r,
                                std::span<const float> r_prime, double lambda);
double loss_air(std::span<const float> r, std::span<const float> r_prime,
                double lambda);

/// Two-list assignment of `v` under any 2-way strategy (including single).
Assignment assign_pair(const CoarseQuantizer& cq, const float* v,
                       const StrategyConfig& cfg);

/// AIR pair selection among the n_cands nearest lists; `is_strict`
/// excludes the primary list. Ties go to the nearer candidate.
Assignment rair_assign(const CoarseQuantizer& cq, const float* v,
                       const StrategyConfig& cfg);

/// Greedy m-way AIR assignment (strict). Returns m distinct list IDs in
/// ascending order.
std::vector<ListId> multi_assign(const CoarseQuantizer& cq, const float* v,
                                 const StrategyConfig& cfg);

/// Pair assignments for every row of `data`, vec_id taken from the row ID.
std::vector<Assignment> assign_all(const CoarseQuantizer& cq,
                                   const VectorSet& data,
                                   const StrategyConfig& cfg,
                                   int num_threads = 1);

}  // namespace rairs
