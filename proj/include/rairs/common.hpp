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
#include <stdexcept>
#include <string>
#include <string_view>

namespace rairs {

using VecId = std::uint64_t;
using ListId = std::uint32_t;

enum class Metric : std::uint8_t { kL2 = 0, kInnerProduct = 1 };

std::string_view metric_name(Metric m);
Metric parse_metric(std::string_view s);

/// Malformed or truncated input file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A vector ID that is already present (insert) or absent (delete).
class IdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define RAIRS_THROW_IF_NOT(cond, exc, msg) \
  do {                                     \
    if (!(cond)) throw exc(msg);           \
  } while (0)

}  // namespace rairs
