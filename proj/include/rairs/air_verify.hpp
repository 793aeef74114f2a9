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
#include <cstdint>
#include <span>
#include <vector>

namespace rairs {

/// Integral of sin^d over [0, pi]: I_0 = pi, I_1 = 2,
/// I_d = (d - 1) / d * I_{d-2}.
double sin_power_integral(int d);

/// Closed-form weight of the inverse-residual term for queries uniform in
/// the ball of radius l_m around x, with primary residual norm `r_norm`:
/// d * I_d * l_m / ((d + 1) * r_norm).
double air_lambda_theory(int d, double l_m, double r_norm);

struct AirCandidateCheck {
  double monte_carlo = 0;  // sampled expected loss
  double closed_form = 0;  // ||r'||^2 + lambda_theory * r.r'
  double ratio = 0;        // monte_carlo / closed_form
};

struct AirVerifyResult {
  int dim = 0;
  double l_m = 0;
  double r_norm = 0;
  double lambda_theory = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<AirCandidateCheck> candidates;
  double correlation = 0;
  /// Least-squares slope of monte_carlo against closed_form.
  double fitted_ratio = 0;
  /// The slope predicted analytically, 1 / ((d - 1) * I_{d-2}).
  double expected_ratio = 0;
  /// max(ratio) / min(ratio); +inf if ratios change sign.
  double ratio_spread = 0;
};

/// Monte Carlo check of the expected second-list loss
///   E_q[ReLU(-cos angle(q - x, c - x)) * (|q - c'|^2 - |q - x|^2)]
/// for q uniform in the ball of radius l_m around x, against the closed
/// form ||r'||^2 + lambda_theory * r.r'. All candidates share the samples.
AirVerifyResult verify_air(std::span<const float> x, std::span<const float> c,
                           std::span<const std::vector<float>> candidates,
                           double l_m, std::size_t samples, std::uint64_t seed);

double pearson_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace rairs
