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

// Texture-oriented background retrieval.
//
// The target is summarized by pooling its encoder token grid over the cells
// the foreground mask covers; every knowledge-base candidate is a globally
// pooled embedding. Candidates are ranked by cosine similarity and the top k
// are returned (ties resolved by ascending id).

#ifndef CAMOVAL_RETRIEVAL_HPP_
#define CAMOVAL_RETRIEVAL_HPP_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "camoval/corpus.hpp"
#include "camoval/error.hpp"

namespace camoval {

template <typename Scalar>
using RowMatrixX =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using EmbeddingVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// grid_h x grid_w token grid; cells holds one D-vector per row, row-major
// over the grid (cell (i, j) is row i * grid_w + j).
template <typename Scalar>
struct FeatureGrid {
  int grid_h = 0;
  int grid_w = 0;
  RowMatrixX<Scalar> cells;

  Eigen::Index dim() const { return cells.cols(); }
  Eigen::Index cell_count() const { return cells.rows(); }

  void Validate() const {
    if (grid_h < 1 || grid_w < 1 ||
        cells.rows() != static_cast<Eigen::Index>(grid_h) * grid_w) {
      throw Error(ErrorCode::kShapeMismatch, "feature grid shape is inconsistent");
    }
    if (!cells.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "feature grid has non-finite values");
    }
  }
};

// Fraction of each grid cell covered by foreground pixels, treating the mask
// and the grid as spanning the same rectangle. Returns grid_h x grid_w.
Eigen::MatrixXd CellCoverage(const RegionMask& mask, int grid_h, int grid_w);

// Cells whose coverage exceeds one half, decided in exact integer arithmetic.
Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> CellSelection(
    const RegionMask& mask, int grid_h, int grid_w);

namespace internal {

template <typename Scalar, typename Weight>
EmbeddingVector<Scalar> WeightedRowMean(const RowMatrixX<Scalar>& cells,
                                        const std::vector<Weight>& weights) {
  EmbeddingVector<Scalar> sum = EmbeddingVector<Scalar>::Zero(cells.cols());
  Scalar total(0);
  for (Eigen::Index r = 0; r < cells.rows(); ++r) {
    const auto w = static_cast<Scalar>(weights[static_cast<std::size_t>(r)]);
    if (w == Scalar(0)) continue;
    if (w == Scalar(1)) {
      sum += cells.row(r).transpose();
    } else {
      sum += w * cells.row(r).transpose();
    }
    total += w;
  }
  return sum / total;
}

}  // namespace internal

template <typename Scalar>
EmbeddingVector<Scalar> GlobalAvgPool(const FeatureGrid<Scalar>& grid) {
  grid.Validate();
  return internal::WeightedRowMean(
      grid.cells, std::vector<int>(static_cast<std::size_t>(grid.cell_count()), 1));
}

// Mean of cells with coverage > 0.5; when no cell qualifies, the
// coverage-weighted mean over every partially covered cell.
template <typename Scalar>
EmbeddingVector<Scalar> MaskedAvgPool(const FeatureGrid<Scalar>& grid,
                                      const RegionMask& mask) {
  grid.Validate();
  if (mask.foreground_count() == 0) {
    throw Error(ErrorCode::kEmptyMask, "masked pooling needs a non-empty mask");
  }
  const Eigen::MatrixXd coverage = CellCoverage(mask, grid.grid_h, grid.grid_w);
  const auto chosen = CellSelection(mask, grid.grid_h, grid.grid_w);
  std::vector<int> selected(static_cast<std::size_t>(grid.cell_count()), 0);
  std::vector<double> weights(selected.size(), 0.0);
  bool any = false;
  for (int i = 0; i < grid.grid_h; ++i) {
    for (int j = 0; j < grid.grid_w; ++j) {
      const auto cell = static_cast<std::size_t>(i * grid.grid_w + j);
      weights[cell] = coverage(i, j);
      if (chosen(i, j)) {
        selected[cell] = 1;
        any = true;
      }
    }
  }
  return any ? internal::WeightedRowMean(grid.cells, selected)
             : internal::WeightedRowMean(grid.cells, weights);
}

// a.b / (|a| |b|) clamped to [-1, 1]; throws kZeroVector on a zero norm.
template <typename DerivedA, typename DerivedB>
double CosineSimilarity(const Eigen::MatrixBase<DerivedA>& a,
                        const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "cosine operands differ in dimension");
  }
  const Eigen::VectorXd ad = a.template cast<double>();
  const Eigen::VectorXd bd = b.template cast<double>();
  const double na = ad.norm();
  const double nb = bd.norm();
  if (na == 0.0 || nb == 0.0) {
    throw Error(ErrorCode::kZeroVector, "cosine similarity of a zero vector");
  }
  return std::clamp(ad.dot(bd) / (na * nb), -1.0, 1.0);
}

template <typename Scalar>
struct KnowledgeBase {
  std::vector<std::string> ids;
  RowMatrixX<Scalar> embeddings;  // K x D, row i belongs to ids[i]

  std::size_t size() const { return ids.size(); }

  void Validate() const {
    if (ids.empty()) {
      throw Error(ErrorCode::kEmptyList, "knowledge base is empty");
    }
    if (static_cast<Eigen::Index>(ids.size()) != embeddings.rows()) {
      throw Error(ErrorCode::kShapeMismatch, "knowledge base ids and rows differ");
    }
    if (std::set<std::string>(ids.begin(), ids.end()).size() != ids.size()) {
      throw Error(ErrorCode::kInvalidArgument, "knowledge base has duplicate ids");
    }
  }
};

struct ScoredCandidate {
  std::string id;
  double score = 0.0;
};

struct RetrievalResult {
  std::vector<ScoredCandidate> ranked;  // non-increasing score
};

template <typename Scalar>
RetrievalResult RetrieveTopK(const EmbeddingVector<Scalar>& target,
                             const KnowledgeBase<Scalar>& base, std::size_t k) {
  base.Validate();
  if (k < 1 || k > base.size()) {
    throw Error(ErrorCode::kKOutOfRange, "k=" + std::to_string(k) +
                                             " outside [1, " +
                                             std::to_string(base.size()) + "]");
  }
  std::vector<double> scores(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    scores[i] = CosineSimilarity(target, base.embeddings.row(
                                             static_cast<Eigen::Index>(i)).transpose());
  }
  std::vector<std::size_t> order(base.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return base.ids[a] < base.ids[b];
                    });
  RetrievalResult result;
  for (std::size_t r = 0; r < k; ++r) {
    result.ranked.push_back({base.ids[order[r]], scores[order[r]]});
  }
  return result;
}

template <typename Scalar>
EmbeddingVector<Scalar> BuildTargetEmbedding(const SampleRecord& sample,
                                             const FeatureGrid<Scalar>& grid) {
  return MaskedAvgPool(grid, sample.mask);
}

}  // namespace camoval

#endif  // CAMOVAL_RETRIEVAL_HPP_
