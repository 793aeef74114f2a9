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

#include "rairs/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

#include "rairs/distance.hpp"
#include "rairs/parallel.hpp"

namespace rairs {

std::string_view metric_name(Metric m) {
  return m == Metric::kL2 ? "l2" : "ip";
}

Metric parse_metric(std::string_view s) {
  if (s == "l2" || s == "L2") return Metric::kL2;
  if (s == "ip" || s == "inner-product" || s == "inner_product") {
    return Metric::kInnerProduct;
  }
  throw std::invalid_argument("unknown metric: " + std::string(s));
}

VectorSet::VectorSet(std::size_t dim, std::vector<float> data)
    : dim_(dim), data_(std::move(data)) {
  if (dim_ == 0) throw std::invalid_argument("VectorSet: dim must be > 0");
  if (data_.size() % dim_ != 0) {
    throw DimensionMismatch("VectorSet: data size not a multiple of dim");
  }
  ids_.resize(data_.size() / dim_);
  std::iota(ids_.begin(), ids_.end(), VecId{0});
}

VectorSet::VectorSet(std::size_t dim, std::vector<float> data,
                     std::vector<VecId> ids)
    : dim_(dim), data_(std::move(data)), ids_(std::move(ids)) {
  if (dim_ == 0) throw std::invalid_argument("VectorSet: dim must be > 0");
  if (data_.size() != ids_.size() * dim_) {
    throw DimensionMismatch("VectorSet: data size != ids * dim");
  }
}

void VectorSet::append(std::span<const float> v, VecId id) {
  if (v.size() != dim_) {
    throw DimensionMismatch("VectorSet::append: expected dim " +
                            std::to_string(dim_) + ", got " +
                            std::to_string(v.size()));
  }
  data_.insert(data_.end(), v.begin(), v.end());
  ids_.push_back(id);
}

VectorSet VectorSet::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > count()) {
    throw std::out_of_range("VectorSet::slice: bad range");
  }
  return VectorSet(dim_,
                   std::vector<float>(data_.begin() + begin * dim_,
                                      data_.begin() + end * dim_),
                   std::vector<VecId>(ids_.begin() + begin, ids_.begin() + end));
}

VectorSet VectorSet::renumbered(VecId first_id) const {
  std::vector<VecId> ids(count());
  std::iota(ids.begin(), ids.end(), first_id);
  return VectorSet(dim_, data_, std::move(ids));
}

void VectorSet::validate() const {
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw FormatError("non-finite component in row " +
                        std::to_string(i / dim_));
    }
  }
  std::unordered_set<VecId> seen;
  seen.reserve(ids_.size());
  for (VecId id : ids_) {
    if (id > kMaxVecId) {
      throw IdError("vector id " + std::to_string(id) + " exceeds 2^48-1");
    }
    if (!seen.insert(id).second) {
      throw IdError("duplicate vector id " + std::to_string(id));
    }
  }
}

// ---------------------------------------------------------------------------
// *vecs I/O

VecFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".fvecs") return VecFormat::kFvecs;
  if (ext == ".bvecs") return VecFormat::kBvecs;
  if (ext == ".ivecs") return VecFormat::kIvecs;
  throw std::invalid_argument("cannot infer vector format from '" +
                              path.string() + "'");
}

namespace {

std::size_t elem_size(VecFormat f) { return f == VecFormat::kBvecs ? 1 : 4; }

std::int32_t read_le_i32(const unsigned char* p) {
  return static_cast<std::int32_t>(std::uint32_t(p[0]) |
                                   std::uint32_t(p[1]) << 8 |
                                   std::uint32_t(p[2]) << 16 |
                                   std::uint32_t(p[3]) << 24);
}

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {});
}

// Walks records, validating the header of each one, and calls
// on_record(payload_ptr) for every record.
template <typename Fn>
std::size_t walk_records(const std::vector<unsigned char>& buf, VecFormat fmt,
                         const std::string& name, Fn&& on_record) {
  const std::size_t esz = elem_size(fmt);
  std::size_t off = 0;
  std::int64_t dim = -1;
  while (off < buf.size()) {
    if (buf.size() - off < 4) {
      throw FormatError(name + ": truncated record header at byte offset " +
                        std::to_string(off));
    }
    const std::int32_t d = read_le_i32(buf.data() + off);
    if (d <= 0) {
      throw FormatError(name + ": invalid dimension " + std::to_string(d) +
                        " at byte offset " + std::to_string(off));
    }
    if (dim < 0) {
      dim = d;
    } else if (d != dim) {
      throw DimensionMismatch(name + ": record at byte offset " +
                              std::to_string(off) + " has dimension " +
                              std::to_string(d) + ", expected " +
                              std::to_string(dim));
    }
    const std::size_t payload = static_cast<std::size_t>(d) * esz;
    if (buf.size() - off - 4 < payload) {
      throw FormatError(name + ": truncated record payload at byte offset " +
                        std::to_string(off));
    }
    on_record(buf.data() + off + 4);
    off += 4 + payload;
  }
  return dim < 0 ? 0 : static_cast<std::size_t>(dim);
}

void write_record_header(std::ofstream& out, std::int32_t d) {
  unsigned char h[4] = {static_cast<unsigned char>(d & 0xff),
                        static_cast<unsigned char>((d >> 8) & 0xff),
                        static_cast<unsigned char>((d >> 16) & 0xff),
                        static_cast<unsigned char>((d >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(h), 4);
}

}  // namespace

VectorSet load_vectors(const std::filesystem::path& path, VecFormat format) {
  if (format == VecFormat::kIvecs) {
    throw std::invalid_argument(
        "load_vectors: ivecs holds integer lists; use load_ivecs");
  }
  static_assert(sizeof(float) == 4);
  const auto buf = read_file(path);
  std::vector<float> data;
  std::size_t dim = 0;
  // First pass fixes the dimension so the data vector can be sized once.
  dim = walk_records(buf, format, path.string(), [](const unsigned char*) {});
  if (dim == 0) throw FormatError(path.string() + ": empty file");
  const std::size_t n = buf.size() / (4 + dim * elem_size(format));
  data.reserve(n * dim);
  walk_records(buf, format, path.string(), [&](const unsigned char* p) {
    if (format == VecFormat::kFvecs) {
      const std::size_t old = data.size();
      data.resize(old + dim);
      std::memcpy(data.data() + old, p, dim * sizeof(float));
    } else {
      for (std::size_t j = 0; j < dim; ++j) data.push_back(float(p[j]));
    }
  });
  VectorSet v(dim, std::move(data));
  v.validate();
  return v;
}

VectorSet load_vectors(const std::filesystem::path& path) {
  return load_vectors(path, format_from_path(path));
}

IntRecords load_ivecs(const std::filesystem::path& path) {
  const auto buf = read_file(path);
  IntRecords r;
  r.dim = walk_records(buf, VecFormat::kIvecs, path.string(),
                       [&](const unsigned char*) {});
  walk_records(buf, VecFormat::kIvecs, path.string(),
               [&](const unsigned char* p) {
                 for (std::size_t j = 0; j < r.dim; ++j) {
                   r.data.push_back(read_le_i32(p + 4 * j));
                 }
               });
  return r;
}

void write_fvecs(const std::filesystem::path& path, const VectorSet& v) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t i = 0; i < v.count(); ++i) {
    write_record_header(out, static_cast<std::int32_t>(v.dim()));
    out.write(reinterpret_cast<const char*>(v.row_ptr(i)),
              static_cast<std::streamsize>(v.dim() * sizeof(float)));
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_bvecs(const std::filesystem::path& path, const VectorSet& v) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::vector<unsigned char> row(v.dim());
  for (std::size_t i = 0; i < v.count(); ++i) {
    write_record_header(out, static_cast<std::int32_t>(v.dim()));
    for (std::size_t j = 0; j < v.dim(); ++j) {
      row[j] = static_cast<unsigned char>(
          std::clamp(std::lround(v.row_ptr(i)[j]), 0L, 255L));
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_ivecs(const std::filesystem::path& path, const IntRecords& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t i = 0; i < r.count(); ++i) {
    write_record_header(out, static_cast<std::int32_t>(r.dim));
    for (std::size_t j = 0; j < r.dim; ++j) {
      write_record_header(out, r.data[i * r.dim + j]);
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

// ---------------------------------------------------------------------------

VectorSet generate_synthetic(std::size_t n, std::size_t dim,
                             std::size_t nclusters, std::uint64_t seed,
                             float spread) {
  if (dim == 0) throw std::invalid_argument("generate_synthetic: dim == 0");
  if (nclusters == 0 || n < nclusters) {
    throw std::invalid_argument("generate_synthetic: need n >= nclusters >= 1");
  }
  if (!(spread >= 0.f)) {
    throw std::invalid_argument("generate_synthetic: spread must be >= 0");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> unit(0.f, 1.f);
  std::vector<float> centers(nclusters * dim);
  for (auto& c : centers) c = unit(rng);

  std::normal_distribution<float> gauss(0.f, 1.f);
  std::vector<float> data(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    const float* c = centers.data() + (i % nclusters) * dim;
    for (std::size_t j = 0; j < dim; ++j) {
      data[i * dim + j] = c[j] + spread * gauss(rng);
    }
  }
  return VectorSet(dim, std::move(data));
}

// ---------------------------------------------------------------------------

IntRecords GroundTruth::to_ivecs() const {
  IntRecords r;
  r.dim = k;
  r.data.reserve(ids.size());
  for (VecId id : ids) {
    if (id > static_cast<VecId>(INT32_MAX)) {
      throw std::out_of_range("ground truth id does not fit ivecs int32");
    }
    r.data.push_back(static_cast<std::int32_t>(id));
  }
  return r;
}

GroundTruth GroundTruth::from_ivecs(const IntRecords& r, Metric metric) {
  GroundTruth gt;
  gt.k = r.dim;
  gt.metric = metric;
  gt.ids.reserve(r.data.size());
  for (std::int32_t v : r.data) {
    if (v < 0) throw FormatError("negative id in ground truth file");
    gt.ids.push_back(static_cast<VecId>(v));
  }
  return gt;
}

GroundTruth exact_knn(const VectorSet& base, const VectorSet& queries,
                      std::size_t k, Metric metric, int num_threads) {
  if (base.dim() != queries.dim()) {
    throw DimensionMismatch("exact_knn: base dim " +
                            std::to_string(base.dim()) + " != query dim " +
                            std::to_string(queries.dim()));
  }
  if (k == 0 || k > base.count()) {
    throw std::invalid_argument("exact_knn: need 1 <= k <= base.count()");
  }
  GroundTruth gt;
  gt.k = k;
  gt.metric = metric;
  gt.ids.resize(queries.count() * k);
  gt.distances.resize(queries.count() * k);
  const std::size_t n = base.count();
  const std::size_t d = base.dim();

  parallel_for_chunks(queries.count(), num_threads,
                      [&](std::size_t qb, std::size_t qe) {
    std::vector<std::pair<float, VecId>> scored(n);
    for (std::size_t q = qb; q < qe; ++q) {
      for (std::size_t i = 0; i < n; ++i) {
        scored[i] = {metric_score(metric, queries.row_ptr(q), base.row_ptr(i), d),
                     base.id(i)};
      }
      std::partial_sort(scored.begin(), scored.begin() + k, scored.end());
      for (std::size_t r = 0; r < k; ++r) {
        gt.ids[q * k + r] = scored[r].second;
        gt.distances[q * k + r] = score_to_distance(metric, scored[r].first);
      }
    }
  });
  return gt;
}

}  // namespace rairs
