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
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "test_util.hpp"

namespace rairs {
namespace {

using testing_util::l2_double;
using testing_util::random_vectors;
using testing_util::temp_path;

void write_bytes(const std::filesystem::path& p, const std::vector<unsigned char>& b) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(b.data()), std::streamsize(b.size()));
}

void put_i32(std::vector<unsigned char>& b, std::int32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<unsigned char>(std::uint32_t(v) >> (8 * i)));
}

void put_f32(std::vector<unsigned char>& b, float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  put_i32(b, static_cast<std::int32_t>(u));
}

TEST(Fvecs, ReadsHandBuiltFile) {
  std::vector<unsigned char> b;
  put_i32(b, 3);
  for (float f : {1.5f, -2.f, 0.25f}) put_f32(b, f);
  put_i32(b, 3);
  for (float f : {7.f, 8.f, 9.f}) put_f32(b, f);
  const auto p = temp_path("hand.fvecs");
  write_bytes(p, b);
  const VectorSet v = load_vectors(p);
  ASSERT_EQ(v.dim(), 3u);
  ASSERT_EQ(v.count(), 2u);
  EXPECT_EQ(v.data(), (std::vector<float>{1.5f, -2.f, 0.25f, 7.f, 8.f, 9.f}));
  EXPECT_EQ(v.ids(), (std::vector<VecId>{0, 1}));
}

TEST(Fvecs, RoundTripIsBitExact) {
  const VectorSet v = random_vectors(57, 13, 3);
  const auto p = temp_path("rt.fvecs");
  write_fvecs(p, v);
  EXPECT_EQ(std::filesystem::file_size(p), 57u * (4 + 13 * 4));
  EXPECT_EQ(load_vectors(p), v);
}

TEST(Bvecs, WidensBytes) {
  std::vector<unsigned char> b;
  put_i32(b, 4);
  for (unsigned char c : {0, 1, 128, 255}) b.push_back(c);
  const auto p = temp_path("hand.bvecs");
  write_bytes(p, b);
  const VectorSet v = load_vectors(p);
  EXPECT_EQ(v.data(), (std::vector<float>{0.f, 1.f, 128.f, 255.f}));

  const VectorSet w(2, {-3.f, 300.f, 4.4f, 4.6f});
  const auto q = temp_path("clamp.bvecs");
  write_bvecs(q, w);
  EXPECT_EQ(load_vectors(q).data(), (std::vector<float>{0.f, 255.f, 4.f, 5.f}));
}

TEST(Ivecs, RoundTrip) {
  IntRecords r;
  r.dim = 3;
  r.data = {1, -2, 3, 4, 5, 2147483647};
  const auto p = temp_path("rt.ivecs");
  write_ivecs(p, r);
  const IntRecords back = load_ivecs(p);
  EXPECT_EQ(back.dim, 3u);
  EXPECT_EQ(back.data, r.data);
}

TEST(Fvecs, TruncatedFileReportsFormatError) {
  std::vector<unsigned char> b;
  put_i32(b, 4);
  put_f32(b, 1.f);
  put_f32(b, 2.f);
  const auto p = temp_path("trunc.fvecs");
  write_bytes(p, b);
  try {
    load_vectors(p);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("offset 0"), std::string::npos) << e.what();
  }
}

TEST(Fvecs, InconsistentDimension) {
  std::vector<unsigned char> b;
  put_i32(b, 2);
  put_f32(b, 1.f);
  put_f32(b, 2.f);
  put_i32(b, 3);
  for (int i = 0; i < 3; ++i) put_f32(b, 0.f);
  const auto p = temp_path("mixed.fvecs");
  write_bytes(p, b);
  EXPECT_THROW(load_vectors(p), DimensionMismatch);
}

TEST(Fvecs, ErrorPaths) {
  EXPECT_THROW(load_vectors(temp_path("missing.fvecs")), std::runtime_error);
  EXPECT_THROW(format_from_path("x.txt"), std::invalid_argument);
  EXPECT_EQ(format_from_path("a/b.BVECS"), VecFormat::kBvecs);
  std::vector<unsigned char> b;
  put_i32(b, -1);
  const auto p = temp_path("neg.fvecs");
  write_bytes(p, b);
  EXPECT_THROW(load_vectors(p), FormatError);
}

TEST(VectorSet, ValidateRejectsBadInput) {
  VectorSet nan(2, {1.f, std::numeric_limits<float>::quiet_NaN()});
  EXPECT_THROW(nan.validate(), FormatError);
  VectorSet dup(1, {1.f, 2.f}, {5, 5});
  EXPECT_THROW(dup.validate(), IdError);
  VectorSet big(1, {1.f}, {kMaxVecId + 1});
  EXPECT_THROW(big.validate(), IdError);
  VectorSet ok(1, {1.f}, {kMaxVecId});
  EXPECT_NO_THROW(ok.validate());
  EXPECT_THROW(VectorSet(3, {1.f, 2.f}), DimensionMismatch);
}

TEST(VectorSet, SliceAndRenumber) {
  const VectorSet v = random_vectors(10, 4, 1);
  const VectorSet s = v.slice(3, 6);
  ASSERT_EQ(s.count(), 3u);
  EXPECT_EQ(s.id(0), 3u);
  EXPECT_EQ(s.row(2)[1], v.row(5)[1]);
  const VectorSet r = s.renumbered(100);
  EXPECT_EQ(r.ids(), (std::vector<VecId>{100, 101, 102}));
  EXPECT_EQ(r.data(), s.data());
}

TEST(Synthetic, DeterministicPerSeed) {
  const VectorSet a = generate_synthetic(500, 8, 7, 42, 0.1f);
  const VectorSet b = generate_synthetic(500, 8, 7, 42, 0.1f);
  const VectorSet c = generate_synthetic(500, 8, 7, 43, 0.1f);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  // Zero spread collapses every member onto its center.
  const VectorSet z = generate_synthetic(21, 3, 7, 1, 0.f);
  for (std::size_t i = 7; i < 21; ++i) {
    EXPECT_TRUE(std::equal(z.row(i).begin(), z.row(i).end(), z.row(i % 7).begin()));
  }
}

// Brute-force oracle in double precision with a full sort.
std::vector<VecId> oracle_knn(const VectorSet& base, const float* q, std::size_t k) {
  std::vector<std::pair<double, VecId>> all;
  for (std::size_t i = 0; i < base.count(); ++i) {
    all.emplace_back(l2_double(base.row_ptr(i), q, base.dim()), base.id(i));
  }
  std::sort(all.begin(), all.end());
  std::vector<VecId> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(all[i].second);
  return out;
}

TEST(ExactKnn, MatchesFullSortOracle) {
  const VectorSet base = random_vectors(2000, 12, 5);
  const VectorSet qs = random_vectors(30, 12, 6);
  const GroundTruth gt = exact_knn(base, qs, 15, Metric::kL2, 3);
  ASSERT_EQ(gt.num_queries(), 30u);
  for (std::size_t q = 0; q < 30; ++q) {
    const auto want = oracle_knn(base, qs.row_ptr(q), 15);
    const auto got = gt.ids_of(q);
    EXPECT_TRUE(std::equal(want.begin(), want.end(), got.begin())) << "query " << q;
    // Distances ascend.
    for (std::size_t i = 1; i < 15; ++i) {
      EXPECT_LE(gt.distances[q * 15 + i - 1], gt.distances[q * 15 + i]);
    }
  }
}

TEST(ExactKnn, TiesGoToSmallerId) {
  VectorSet base(1, {5.f, 1.f, 1.f, 1.f, 9.f}, {40, 30, 10, 20, 0});
  VectorSet q(1, {1.f});
  const GroundTruth gt = exact_knn(base, q, 3, Metric::kL2);
  EXPECT_EQ(std::vector<VecId>(gt.ids.begin(), gt.ids.end()),
            (std::vector<VecId>{10, 20, 30}));
}

TEST(ExactKnn, InnerProductRanksByLargestDot) {
  VectorSet base(2, {1.f, 0.f, 0.f, 3.f, -1.f, -1.f, 2.f, 2.f});
  VectorSet q(2, {0.f, 1.f});
  const GroundTruth gt = exact_knn(base, q, 4, Metric::kInnerProduct);
  EXPECT_EQ(std::vector<VecId>(gt.ids.begin(), gt.ids.end()),
            (std::vector<VecId>{1, 3, 0, 2}));
  EXPECT_FLOAT_EQ(gt.distances[0], 3.f);
}

TEST(ExactKnn, RejectsBadK) {
  const VectorSet base = random_vectors(5, 2, 1);
  EXPECT_THROW(exact_knn(base, base, 6, Metric::kL2), std::invalid_argument);
  EXPECT_THROW(exact_knn(base, random_vectors(2, 3, 1), 1, Metric::kL2),
               DimensionMismatch);
}

TEST(GroundTruth, IvecsRoundTrip) {
  const VectorSet base = random_vectors(300, 4, 9);
  const GroundTruth gt = exact_knn(base, random_vectors(7, 4, 10), 5, Metric::kL2);
  const auto p = temp_path("gt.ivecs");
  write_ivecs(p, gt.to_ivecs());
  const GroundTruth back = GroundTruth::from_ivecs(load_ivecs(p), Metric::kL2);
  EXPECT_EQ(back.k, 5u);
  EXPECT_EQ(back.ids, gt.ids);
  EXPECT_FALSE(back.has_distances());
}

}  // namespace
}  // namespace rairs
