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

#include "rairs/pq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rairs/coarse_quantizer.hpp"
#include "rairs/distance.hpp"

namespace rairs {

PQCodebook::PQCodebook(std::size_t dim, std::size_t num_groups,
                       std::size_t nbits, std::vector<float> sub_centroids)
    : dim_(dim),
      num_groups_(num_groups),
      nbits_(nbits),
      centroids_(std::move(sub_centroids)) {
  if (num_groups_ == 0 || dim_ % num_groups_ != 0) {
    throw std::invalid_argument("PQCodebook: number of sub-groups (" +
                                std::to_string(num_groups_) +
                                ") must divide dim (" + std::to_string(dim_) +
                                ")");
  }
  if (nbits_ == 0 || nbits_ > 8) {
    throw std::invalid_argument("PQCodebook: nbits must be in [1, 8]");
  }
  dsub_ = dim_ / num_groups_;
  if (centroids_.size() != num_groups_ * ksub() * dsub_) {
    throw std::invalid_argument("PQCodebook: sub-centroid table has wrong size");
  }
}

PQCodebook PQCodebook::train(const VectorSet& data, std::size_t num_groups,
                             std::size_t nbits, std::uint64_t seed,
                             std::size_t iters) {
  const std::size_t dim = data.dim();
  if (num_groups == 0 || dim % num_groups != 0) {
    throw std::invalid_argument("PQCodebook::train: number of sub-groups (" +
                                std::to_string(num_groups) +
                                ") must divide dim (" + std::to_string(dim) +
                                ")");
  }
  if (nbits == 0 || nbits > 8) {
    throw std::invalid_argument("PQCodebook::train: nbits must be in [1, 8]");
  }
  const std::size_t ksub = std::size_t{1} << nbits;
  if (data.count() < ksub) {
    throw std::invalid_argument("PQCodebook::train: need at least 2^nbits points");
  }
  const std::size_t dsub = dim / num_groups;
  const std::size_t n = data.count();
  std::vector<float> cent(num_groups * ksub * dsub);
  std::vector<float> sub(n * dsub);
  for (std::size_t m = 0; m < num_groups; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      std::copy_n(data.row_ptr(i) + m * dsub, dsub, sub.data() + i * dsub);
    }
    auto res = kmeans(sub, dsub, ksub, iters, seed + 7919 * m);
    std::copy(res.centroids.begin(), res.centroids.end(),
              cent.begin() + m * ksub * dsub);
  }
  return PQCodebook(dim, num_groups, nbits, std::move(cent));
}

void PQCodebook::encode(const float* v, std::uint8_t* code) const {
  const std::size_t ks = ksub();
  for (std::size_t m = 0; m < num_groups_; ++m) {
    const float* x = v + m * dsub_;
    float best = std::numeric_limits<float>::infinity();
    std::size_t arg = 0;
    for (std::size_t j = 0; j < ks; ++j) {
      const float d = l2_sqr(x, sub_centroid(m, j), dsub_);
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    code[m] = static_cast<std::uint8_t>(arg);
  }
}

std::vector<std::uint8_t> PQCodebook::encode(std::span<const float> v) const {
  if (v.size() != dim_) throw DimensionMismatch("PQCodebook::encode: bad dim");
  std::vector<std::uint8_t> code(num_groups_);
  encode(v.data(), code.data());
  return code;
}

void PQCodebook::decode(const std::uint8_t* code, float* out) const {
  for (std::size_t m = 0; m < num_groups_; ++m) {
    std::copy_n(sub_centroid(m, code[m]), dsub_, out + m * dsub_);
  }
}

Lut PQCodebook::build_lut(const float* q, Metric metric) const {
  Lut lut;
  lut.num_groups = num_groups_;
  lut.ksub = ksub();
  lut.metric = metric;
  lut.table.resize(num_groups_ * lut.ksub);
  for (std::size_t m = 0; m < num_groups_; ++m) {
    const float* x = q + m * dsub_;
    for (std::size_t j = 0; j < lut.ksub; ++j) {
      lut.table[m * lut.ksub + j] =
          metric == Metric::kL2 ? l2_sqr(x, sub_centroid(m, j), dsub_)
                                : -inner_product(x, sub_centroid(m, j), dsub_);
    }
  }
  return lut;
}

// ---------------------------------------------------------------------------

std::size_t BlockArray::total_valid() const {
  std::size_t t = 0;
  for (auto v : valid_) t += v;
  return t;
}

std::size_t BlockArray::add_block() {
  codes_.resize(codes_.size() + num_groups_ * block_size_, 0);
  ids_.resize(ids_.size() + block_size_, kInvalidStoredId);
  valid_.push_back(0);
  return valid_.size() - 1;
}

void BlockArray::pop_block() {
  codes_.resize(codes_.size() - num_groups_ * block_size_);
  ids_.resize(ids_.size() - block_size_);
  valid_.pop_back();
}

void BlockArray::read_code(std::size_t b, std::size_t s,
                           std::uint8_t* code) const {
  for (std::size_t m = 0; m < num_groups_; ++m) code[m] = code_word(b, s, m);
}

void BlockArray::set_slot(std::size_t b, std::size_t s,
                          const std::uint8_t* code, std::uint64_t stored_id) {
  std::uint64_t& slot = ids_[b * block_size_ + s];
  if (slot != kInvalidStoredId) --valid_[b];
  slot = stored_id;
  if (stored_id != kInvalidStoredId) ++valid_[b];
  for (std::size_t m = 0; m < num_groups_; ++m) {
    codes_[(b * num_groups_ + m) * block_size_ + s] = code[m];
  }
}

void BlockArray::invalidate(std::size_t b, std::size_t s) {
  std::uint64_t& slot = ids_[b * block_size_ + s];
  if (slot != kInvalidStoredId) {
    slot = kInvalidStoredId;
    --valid_[b];
  }
}

void BlockArray::assign_raw(std::vector<std::uint8_t> codes,
                            std::vector<std::uint64_t> ids) {
  if (block_size_ == 0 || ids.size() % block_size_ != 0 ||
      codes.size() != ids.size() * num_groups_) {
    throw FormatError("BlockArray: inconsistent raw arrays");
  }
  codes_ = std::move(codes);
  ids_ = std::move(ids);
  valid_.assign(ids_.size() / block_size_, 0);
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i] != kInvalidStoredId) ++valid_[i / block_size_];
  }
}

std::size_t scan_block(const Lut& lut, const BlockView& block,
                       std::vector<ScanHit>& out) {
  return scan_block(lut, block, [&](std::uint64_t id, float d) {
    out.push_back({id, d});
  });
}

}  // namespace rairs
