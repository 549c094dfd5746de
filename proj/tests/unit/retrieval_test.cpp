/* Copyright 2026 The Camoval Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <doctest.h>

#include <cmath>

#include "camoval/error.hpp"
#include "camoval/retrieval.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace camoval {
namespace {

using testing::Rng;

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;
}

FeatureGrid<double> RandomGrid(Rng& rng, int gh, int gw, int d) {
  FeatureGrid<double> g{gh, gw, RowMatrixX<double>(gh * gw, d)};
  for (Eigen::Index i = 0; i < g.cells.size(); ++i) g.cells(i) = rng.Normal();
  return g;
}

TEST_CASE("pooling basics") {
  FeatureGrid<double> one{1, 1, RowMatrixX<double>(1, 3)};
  one.cells << 1, 2, 3;
  CHECK(GlobalAvgPool(one) == Eigen::Vector3d(1, 2, 3));

  FeatureGrid<double> pair{1, 2, RowMatrixX<double>(2, 2)};
  pair.cells << 1.5, -2, -1.5, 2;
  CHECK(GlobalAvgPool(pair).isZero(0.0));
}

TEST_CASE("global pool matches direct summation") {
  Rng rng(19);
  const auto g = RandomGrid(rng, 7, 7, 16);
  const Eigen::VectorXd pooled = GlobalAvgPool(g);
  for (int d = 0; d < 16; ++d) {
    long double s = 0;
    for (int c = 0; c < 49; ++c) s += g.cells(c, d);
    CHECK(std::fabs(pooled(d) - static_cast<double>(s / 49)) < 1e-10);
  }
}

TEST_CASE("masked pool selects covered cells") {
  Rng rng(2);
  const auto g2 = RandomGrid(rng, 2, 2, 5);
  const RegionMask quadrant = testing::RectMask(8, 8, 0, 0, 4, 4);
  CHECK(MaskedAvgPool(g2, quadrant) == Eigen::VectorXd(g2.cells.row(0).transpose()));

  const RegionMask full = RegionMask(8, 8).Inverted();
  CHECK(MaskedAvgPool(g2, full) == GlobalAvgPool(g2));

  // Three of sixteen cells fully covered on a 16x16 mask.
  const auto g4 = RandomGrid(rng, 4, 4, 6);
  RegionMask three(16, 16);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 12; ++x) three.set(x, y, true);
  }
  const Eigen::VectorXd got = MaskedAvgPool(g4, three);
  for (int d = 0; d < 6; ++d) {
    const long double want =
        (static_cast<long double>(g4.cells(0, d)) + g4.cells(1, d) + g4.cells(2, d)) / 3;
    CHECK(std::fabs(got(d) - static_cast<double>(want)) < 1e-12);
  }
  CHECK(CodeOf([&] { MaskedAvgPool(g4, RegionMask(16, 16)); }) == ErrorCode::kEmptyMask);
}

TEST_CASE("full masks pool exactly like the global pool") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = RandomGrid(rng, rng.Int(1, 9), rng.Int(1, 9), rng.Int(1, 16));
    const RegionMask full = RegionMask(rng.Int(1, 40), rng.Int(1, 40)).Inverted();
    CHECK(MaskedAvgPool(g, full) == GlobalAvgPool(g));
  }
}

TEST_CASE("cell coverage agrees with per-pixel integration") {
  Rng rng(33);
  for (int trial = 0; trial < 60; ++trial) {
    const int w = rng.Int(1, 13), h = rng.Int(1, 13);
    const int gh = rng.Int(1, 7), gw = rng.Int(1, 7);
    const RegionMask m = testing::RandomMask(rng, w, h, rng.Uniform(0.1, 0.9));
    const Eigen::MatrixXd cov = CellCoverage(m, gh, gw);
    for (int i = 0; i < gh; ++i) {
      for (int j = 0; j < gw; ++j) {
        CHECK(std::fabs(cov(i, j) - oracle::CellCoverage(m, gh, gw, i, j)) < 1e-12);
      }
    }
  }
}

TEST_CASE("sparse masks fall back to coverage weights") {
  // One foreground pixel in a 10x10 mask, 2x2 grid: no cell exceeds one half.
  Rng rng(4);
  const auto g = RandomGrid(rng, 2, 2, 3);
  RegionMask m(10, 10);
  m.set(7, 1, true);
  const Eigen::VectorXd got = MaskedAvgPool(g, m);
  CHECK((got - g.cells.row(1).transpose()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("exactly half-covered cells are not selected") {
  // 3x3 mask on a 2x2 grid: each cell spans 1.5 x 1.5 pixels.
  RegionMask m(3, 3);
  m.set(0, 0, true);
  m.set(1, 0, true);  // top-left cell gets 1 + 0.5 = 1.5 of 2.25
  m.set(0, 2, true);  // bottom-left cell gets 1 of 2.25
  const auto sel = CellSelection(m, 2, 2);
  CHECK(sel(0, 0));
  CHECK_FALSE(sel(1, 0));
  // 6x6 mask, 3x3 grid, one cell with two of four pixels.
  RegionMask half(6, 6);
  half.set(0, 0, true);
  half.set(1, 0, true);
  CHECK(CellCoverage(half, 3, 3)(0, 0) == 0.5);
  CHECK_FALSE(CellSelection(half, 3, 3)(0, 0));
  // 10x10 mask, 3x3 grid: cells are 10/3 pixels wide, coverage 1/2 exactly.
  RegionMask third(10, 10);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) {
      if (3 * x + 1 < 5 && 3 * y < 10) third.set(x, y, 3 * y + 1 < 10);
    }
  }
  const auto cov = CellCoverage(third, 3, 3);
  const auto s3 = CellSelection(third, 3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(s3(i, j) == (oracle::CellCoverage(third, 3, 3, i, j) > 0.5 + 1e-12));
      CHECK(std::fabs(cov(i, j) - oracle::CellCoverage(third, 3, 3, i, j)) < 1e-12);
    }
  }
}

TEST_CASE("masked pool is the composition of coverage and averaging") {
  Rng rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const int gh = rng.Int(1, 6), gw = rng.Int(1, 6);
    const auto g = RandomGrid(rng, gh, gw, 4);
    const RegionMask m = testing::RandomMixedMask(rng, rng.Int(2, 20), rng.Int(2, 20));
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(4);
    int n = 0;
    bool near_half = false;
    for (int i = 0; i < gh; ++i) {
      for (int j = 0; j < gw; ++j) {
        const double cov = oracle::CellCoverage(m, gh, gw, i, j);
        near_half = near_half || std::fabs(cov - 0.5) < 1e-9;
        if (cov > 0.5) {
          sum += g.cells.row(i * gw + j).transpose();
          ++n;
        }
      }
    }
    if (n == 0 || near_half) continue;
    SampleRecord s{"x", ImageBuffer(m.width(), m.height()), m, Subset::kCamouflaged};
    CHECK((BuildTargetEmbedding(s, g) - sum / n).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("cosine similarity") {
  CHECK(CosineSimilarity(Eigen::Vector3d(1, 2, 2), Eigen::Vector3d(2, 1, 2)) ==
        doctest::Approx(8.0 / 9.0).epsilon(1e-15));
  CHECK(CosineSimilarity(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)) == 0.0);
  const Eigen::Vector3d a(0.3, -2, 5);
  CHECK(CosineSimilarity(a, a) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(CosineSimilarity(a, a) <= 1.0);
  CHECK(CodeOf([] { CosineSimilarity(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0)); }) ==
        ErrorCode::kZeroVector);
  CHECK(CodeOf([] { CosineSimilarity(Eigen::Vector2d(1, 0), Eigen::Vector3d(1, 0, 0)); }) ==
        ErrorCode::kDimensionMismatch);
}

KnowledgeBase<double> RandomBase(Rng& rng, int k, int d) {
  KnowledgeBase<double> kb;
  kb.embeddings.resize(k, d);
  for (int i = 0; i < k; ++i) {
    kb.ids.push_back("c" + std::to_string(i));
    for (int j = 0; j < d; ++j) kb.embeddings(i, j) = rng.Normal();
  }
  return kb;
}

TEST_CASE("top-k ranking") {
  Rng rng(10);
  const auto kb = RandomBase(rng, 10, 8);
  const Eigen::VectorXd target = kb.embeddings.row(7).transpose();
  const RetrievalResult r = RetrieveTopK(target, kb, 3);
  REQUIRE(r.ranked.size() == 3);
  CHECK(r.ranked[0].id == "c7");
  CHECK(r.ranked[0].score == doctest::Approx(1.0).epsilon(1e-15));

  const RetrievalResult all = RetrieveTopK(target, kb, 10);
  CHECK(all.ranked.size() == 10);
  for (std::size_t i = 1; i < all.ranked.size(); ++i) {
    CHECK(all.ranked[i - 1].score >= all.ranked[i].score);
  }
  // Full-sort oracle.
  std::vector<std::pair<double, std::string>> sorted;
  for (int i = 0; i < 10; ++i) {
    sorted.push_back({oracle::Cosine(target, kb.embeddings.row(i).transpose()), kb.ids[i]});
  }
  std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.first > b.first; });
  for (int i = 0; i < 3; ++i) CHECK(r.ranked[i].id == sorted[i].second);

  CHECK(CodeOf([&] { RetrieveTopK(target, kb, 0); }) == ErrorCode::kKOutOfRange);
  CHECK(CodeOf([&] { RetrieveTopK(target, kb, 11); }) == ErrorCode::kKOutOfRange);
  KnowledgeBase<double> empty;
  CHECK(CodeOf([&] { RetrieveTopK(target, empty, 1); }) == ErrorCode::kEmptyList);
  KnowledgeBase<double> dup = kb;
  dup.ids[1] = dup.ids[0];
  CHECK(CodeOf([&] { RetrieveTopK(target, dup, 1); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("ties resolve by id") {
  KnowledgeBase<double> kb;
  kb.ids = {"b", "a", "c"};
  kb.embeddings.resize(3, 2);
  kb.embeddings << 1, 0, 2, 0, 0, 1;
  const RetrievalResult r = RetrieveTopK(Eigen::VectorXd(Eigen::Vector2d(1, 0)), kb, 2);
  CHECK(r.ranked[0].id == "a");
  CHECK(r.ranked[1].id == "b");
}

TEST_CASE("top-k equals repeated argmax-and-remove") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int k_total = rng.Int(1, 64);
    const int d = rng.Int(2, 16);
    const auto kb = RandomBase(rng, k_total, d);
    Eigen::VectorXd target(d);
    for (int j = 0; j < d; ++j) target(j) = rng.Normal();
    const auto k = static_cast<std::size_t>(rng.Int(1, k_total));
    std::vector<Eigen::VectorXd> rows;
    for (int i = 0; i < k_total; ++i) rows.push_back(kb.embeddings.row(i).transpose());
    const auto want = oracle::ArgmaxRemove(target, kb.ids, rows, k);
    const auto got = RetrieveTopK(target, kb, k);
    REQUIRE(got.ranked.size() == k);
    for (std::size_t i = 0; i < k; ++i) CHECK(got.ranked[i].id == want[i]);
  }
}

TEST_CASE("float grids pool and rank") {
  FeatureGrid<float> g{1, 2, RowMatrixX<float>(2, 2)};
  g.cells << 1.0f, 2.0f, 3.0f, 4.0f;
  CHECK(GlobalAvgPool(g) == Eigen::Vector2f(2.0f, 3.0f));
  FeatureGrid<float> bad{2, 2, RowMatrixX<float>(3, 2)};
  CHECK(CodeOf([&] { GlobalAvgPool(bad); }) == ErrorCode::kShapeMismatch);
}

TEST_CASE("ranking is scale invariant and prefix consistent") {
  Rng rng(55);
  for (int trial = 0; trial < 100; ++trial) {
    const int k_total = rng.Int(2, 40);
    auto kb = RandomBase(rng, k_total, rng.Int(2, 10));
    Eigen::VectorXd target(kb.embeddings.cols());
    for (Eigen::Index j = 0; j < target.size(); ++j) target(j) = rng.Normal();
    const auto k = static_cast<std::size_t>(rng.Int(1, k_total - 1));
    const auto base = RetrieveTopK(target, kb, k);
    const auto longer = RetrieveTopK(target, kb, k + 1);
    for (std::size_t i = 0; i < k; ++i) CHECK(longer.ranked[i].id == base.ranked[i].id);
    KnowledgeBase<double> scaled = kb;
    scaled.embeddings *= rng.Uniform(0.01, 100.0);
    const auto again = RetrieveTopK(target, scaled, k);
    for (std::size_t i = 0; i < k; ++i) CHECK(again.ranked[i].id == base.ranked[i].id);
  }
}

}  // namespace
}  // namespace camoval
