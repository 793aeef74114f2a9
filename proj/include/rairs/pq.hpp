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

#include "rairs/common.hpp"
#include "rairs/dataset.hpp"

namespace rairs {

/// Reserved stored-ID word for padding and tombstoned slots.
inline constexpr std::uint64_t kInvalidStoredId = ~std::uint64_t{0};

inline constexpr std::size_t kMaxBlockSize = 256;

/// Per-query lookup table: entry(m, j) is the contribution of code word j
/// in sub-group m. Inner-product entries are negated dot products so that
/// smaller accumulated values are better for either metric.
struct Lut {
  std::size_t num_groups = 0;
  std::size_t ksub = 0;
  Metric metric = Metric::kL2;
  std::vector<float> table;  // num_groups * ksub

  float entry(std::size_t m, std::size_t j) const {
    return table[m * ksub + j];
  }
};

/// Product quantizer: `num_groups` sub-quantizers of 2^nbits centroids each.
class PQCodebook {
 public:
  PQCodebook() = default;
  PQCodebook(std::size_t dim, std::size_t num_groups, std::size_t nbits,
             std::vector<float> sub_centroids);

  /// Independent k-means per sub-group.
  static PQCodebook train(const VectorSet& data, std::size_t num_groups,
                          std::size_t nbits, std::uint64_t seed,
                          std::size_t iters = 25);

  std::size_t dim() const { return dim_; }
  std::size_t num_groups() const { return num_groups_; }
  std::size_t nbits() const { return nbits_; }
  std::size_t ksub() const { return std::size_t{1} << nbits_; }
  std::size_t dsub() const { return dsub_; }
  std::size_t code_size() const { return num_groups_; }
  const std::vector<float>& sub_centroids() const { return centroids_; }
  const float* sub_centroid(std::size_t m, std::size_t j) const {
    return centroids_.data() + (m * ksub() + j) * dsub_;
  }

  /// Nearest sub-centroid per group, ties to the smaller index.
  void encode(const float* v, std::uint8_t* code) const;
  std::vector<std::uint8_t> encode(std::span<const float> v) const;
  void decode(const std::uint8_t* code, float* out) const;

  Lut build_lut(const float* q, Metric metric) const;
  Lut build_lut(std::span<const float> q, Metric metric) const {
    return build_lut(q.data(), metric);
  }

 private:
  std::size_t dim_ = 0;
  std::size_t num_groups_ = 0;
  std::size_t nbits_ = 0;
  std::size_t dsub_ = 0;
  std::vector<float> centroids_;  // num_groups * ksub * dsub
};

/// Scalar ADC: sum of lut entries for m = 0..M-1, in that order.
inline float adc_distance(const Lut& lut, const std::uint8_t* code) {
  float acc = 0.f;
  for (std::size_t m = 0; m < lut.num_groups; ++m) {
    acc += lut.table[m * lut.ksub + code[m]];
  }
  return acc;
}

/// Non-owning view of one packed block. Codes are stored group-major:
/// code word m of slot s is at codes[m * block_size + s].
struct BlockView {
  std::size_t num_groups = 0;
  std::size_t block_size = 0;
  const std::uint8_t* codes = nullptr;
  const std::uint64_t* ids = nullptr;
};

/// Contiguous array of fixed-size packed blocks. Unfilled and tombstoned
/// slots carry kInvalidStoredId.
class BlockArray {
 public:
  BlockArray() = default;
  BlockArray(std::size_t num_groups, std::size_t block_size)
      : num_groups_(num_groups), block_size_(block_size) {}

  std::size_t num_groups() const { return num_groups_; }
  std::size_t block_size() const { return block_size_; }
  std::size_t num_blocks() const { return valid_.size(); }
  bool empty() const { return valid_.empty(); }

  BlockView block(std::size_t b) const {
    return {num_groups_, block_size_,
            codes_.data() + b * num_groups_ * block_size_,
            ids_.data() + b * block_size_};
  }
  std::uint32_t valid_count(std::size_t b) const { return valid_[b]; }
  std::size_t total_valid() const;

  /// Appends an empty block (all slots invalid) and returns its index.
  std::size_t add_block();
  void pop_block();

  std::uint64_t slot_id(std::size_t b, std::size_t s) const {
    return ids_[b * block_size_ + s];
  }
  std::uint8_t code_word(std::size_t b, std::size_t s, std::size_t m) const {
    return codes_[(b * num_groups_ + m) * block_size_ + s];
  }
  void read_code(std::size_t b, std::size_t s, std::uint8_t* code) const;
  /// Writes a code and ID into slot (b, s), keeping valid counts in sync.
  void set_slot(std::size_t b, std::size_t s, const std::uint8_t* code,
                std::uint64_t stored_id);
  /// Marks (b, s) invalid; the code bytes are left in place.
  void invalidate(std::size_t b, std::size_t s);

  // Raw access for serialization.
  const std::vector<std::uint8_t>& raw_codes() const { return codes_; }
  const std::vector<std::uint64_t>& raw_ids() const { return ids_; }
  void assign_raw(std::vector<std::uint8_t> codes, std::vector<std::uint64_t> ids);

  std::size_t memory_bytes() const {
    return codes_.size() + ids_.size() * sizeof(std::uint64_t);
  }

 private:
  std::size_t num_groups_ = 0;
  std::size_t block_size_ = 0;
  std::vector<std::uint8_t> codes_;
  std::vector<std::uint64_t> ids_;
  std::vector<std::uint32_t> valid_;
};

struct ScanHit {
  std::uint64_t stored_id;
  float distance;
};

/// Accumulates LUT entries for every slot of `block` in group order and
/// calls sink(stored_id, distance) for each valid slot. Returns the number
/// of valid slots, i.e. the distance computations this block accounts for.
template <typename Sink>
std::size_t scan_block(const Lut& lut, const BlockView& block, Sink&& sink) {
  float acc[kMaxBlockSize];
  const std::size_t bs = block.block_size;
  for (std::size_t s = 0; s < bs; ++s) acc[s] = 0.f;
  for (std::size_t m = 0; m < block.num_groups; ++m) {
    const float* row = lut.table.data() + m * lut.ksub;
    const std::uint8_t* c = block.codes + m * bs;
    for (std::size_t s = 0; s < bs; ++s) acc[s] += row[c[s]];
  }
  std::size_t nvalid = 0;
  for (std::size_t s = 0; s < bs; ++s) {
    if (block.ids[s] == kInvalidStoredId) continue;
    ++nvalid;
    sink(block.ids[s], acc[s]);
  }
  return nvalid;
}

/// Convenience overload collecting (stored ID, distance) pairs.
std::size_t scan_block(const Lut& lut, const BlockView& block,
                       std::vector<ScanHit>& out);

}  // namespace rairs
