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

#include "rairs/air_verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace rairs {

double sin_power_integral(int d) {
  if (d < 0) throw std::invalid_argument("sin_power_integral: d must be >= 0");
  double even = std::numbers::pi;  // I_0
  double odd = 2.0;                // I_1
  if (d == 0) return even;
  if (d == 1) return odd;
  double cur = (d % 2 == 0) ? even : odd;
  for (int k = (d % 2 == 0) ? 2 : 3; k <= d; k += 2) {
    cur *= double(k - 1) / double(k);
  }
  return cur;
}

double air_lambda_theory(int d, double l_m, double r_norm) {
  if (!(r_norm > 0)) throw std::invalid_argument("air_lambda_theory: ||r|| must be > 0");
  return d * sin_power_integral(d) * l_m / ((d + 1) * r_norm);
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("pearson_correlation: need two equal series of >= 2");
  }
  const double n = double(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0 || sbb == 0) return 0;
  return sab / std::sqrt(saa * sbb);
}

AirVerifyResult verify_air(std::span<const float> x, std::span<const float> c,
                           std::span<const std::vector<float>> candidates,
                           double l_m, std::size_t samples, std::uint64_t seed) {
  const std::size_t d = x.size();
  if (d < 2 || c.size() != d) throw std::invalid_argument("verify_air: need dim >= 2");
  if (!(l_m > 0)) throw std::invalid_argument("verify_air: l_m must be > 0");
  if (samples == 0) throw std::invalid_argument("verify_air: samples must be > 0");

  std::vector<double> r(d);
  double r_norm2 = 0;
  for (std::size_t j = 0; j < d; ++j) {
    r[j] = double(c[j]) - double(x[j]);
    r_norm2 += r[j] * r[j];
  }
  if (r_norm2 == 0) throw std::invalid_argument("verify_air: c == x (zero residual)");

  AirVerifyResult res;
  res.dim = static_cast<int>(d);
  res.l_m = l_m;
  res.r_norm = std::sqrt(r_norm2);
  res.lambda_theory = air_lambda_theory(res.dim, l_m, res.r_norm);
  res.expected_ratio = 1.0 / ((d - 1) * sin_power_integral(res.dim - 2));
  res.samples = samples;
  res.seed = seed;

  const std::size_t nc = candidates.size();
  std::vector<std::vector<double>> cp(nc, std::vector<double>(d));
  for (std::size_t k = 0; k < nc; ++k) {
    if (candidates[k].size() != d) throw std::invalid_argument("verify_air: candidate dim");
    for (std::size_t j = 0; j < d; ++j) cp[k][j] = candidates[k][j];
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> sum(nc, 0.0);
  std::vector<double> q(d), dir(d);
  for (std::size_t s = 0; s < samples; ++s) {
    double n2 = 0;
    for (auto& v : dir) {
      v = gauss(rng);
      n2 += v * v;
    }
    const double radius = l_m * std::pow(unit(rng), 1.0 / double(d));
    const double scale = radius / std::sqrt(n2);
    double proj = 0;  // (q - x) . r
    for (std::size_t j = 0; j < d; ++j) {
      const double off = dir[j] * scale;
      q[j] = x[j] + off;
      proj += off * r[j];
    }
    const double cos_a = radius > 0 ? proj / (radius * res.r_norm) : 0.0;
    const double w = std::max(0.0, -cos_a);
    if (w == 0) continue;
    double dqx = 0;
    for (std::size_t j = 0; j < d; ++j) dqx += (q[j] - x[j]) * (q[j] - x[j]);
    for (std::size_t k = 0; k < nc; ++k) {
      double dqc = 0;
      for (std::size_t j = 0; j < d; ++j) {
        const double t = q[j] - cp[k][j];
        dqc += t * t;
      }
      sum[k] += w * (dqc - dqx);
    }
  }

  std::vector<double> mc(nc), cf(nc);
  double min_ratio = std::numeric_limits<double>::infinity();
  double max_ratio = -std::numeric_limits<double>::infinity();
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < nc; ++k) {
    double rp2 = 0, rrp = 0;
    for (std::size_t j = 0; j < d; ++j) {
      const double rp = cp[k][j] - double(x[j]);
      rp2 += rp * rp;
      rrp += r[j] * rp;
    }
    AirCandidateCheck chk;
    chk.monte_carlo = sum[k] / double(samples);
    chk.closed_form = rp2 + res.lambda_theory * rrp;
    chk.ratio = chk.closed_form != 0 ? chk.monte_carlo / chk.closed_form
                                     : std::numeric_limits<double>::quiet_NaN();
    min_ratio = std::min(min_ratio, chk.ratio);
    max_ratio = std::max(max_ratio, chk.ratio);
    mc[k] = chk.monte_carlo;
    cf[k] = chk.closed_form;
    sxy += chk.monte_carlo * chk.closed_form;
    sxx += chk.closed_form * chk.closed_form;
    res.candidates.push_back(chk);
  }
  if (nc >= 2) res.correlation = pearson_correlation(mc, cf);
  res.fitted_ratio = sxx > 0 ? sxy / sxx : 0;
  res.ratio_spread = (nc > 0 && min_ratio > 0)
                         ? max_ratio / min_ratio
                         : std::numeric_limits<double>::infinity();
  return res;
}

}  // namespace rairs
