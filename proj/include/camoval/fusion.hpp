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

// Textual-visual condition assembly.
//
// The visual condition keeps the target's own tokens on foreground cells and
// replaces background cells with the average of retrieved token grids:
//
//   training:  bg = (e_t + sum_j e_j) / (k + 1)
//   inference: bg = (sum_j e_j) / k
//
// The prompt is [textual tokens..., class token, visual cells row-major].

#ifndef CAMOVAL_FUSION_HPP_
#define CAMOVAL_FUSION_HPP_

#include <span>
#include <string_view>
#include <vector>

#include "camoval/retrieval.hpp"

namespace camoval {

template <typename Scalar>
using VisualTokenGrid = FeatureGrid<Scalar>;

template <typename Scalar>
VisualTokenGrid<Scalar> FuseVisual(const VisualTokenGrid<Scalar>& target,
                                   std::span<const VisualTokenGrid<Scalar>> retrieved,
                                   const RegionMask& mask, RunMode mode) {
  target.Validate();
  if (retrieved.empty()) {
    throw Error(ErrorCode::kEmptyRetrievalList, "fusion needs at least one retrieved grid");
  }
  for (const auto& r : retrieved) {
    r.Validate();
    if (r.grid_h != target.grid_h || r.grid_w != target.grid_w ||
        r.dim() != target.dim()) {
      throw Error(ErrorCode::kShapeMismatch, "retrieved grid shape differs from target");
    }
  }
  const auto foreground = CellSelection(mask, target.grid_h, target.grid_w);
  const auto k = static_cast<Scalar>(retrieved.size());
  const Scalar scale =
      mode == RunMode::kTraining ? Scalar(1) / (k + Scalar(1)) : Scalar(1) / k;

  VisualTokenGrid<Scalar> out = target;
  for (int i = 0; i < target.grid_h; ++i) {
    for (int j = 0; j < target.grid_w; ++j) {
      if (foreground(i, j)) continue;
      const Eigen::Index cell = static_cast<Eigen::Index>(i) * target.grid_w + j;
      const auto& first = mode == RunMode::kTraining ? target.cells : retrieved[0].cells;
      EmbeddingVector<Scalar> sum = first.row(cell).transpose();
      for (std::size_t r = mode == RunMode::kTraining ? 0 : 1; r < retrieved.size(); ++r) {
        sum += retrieved[r].cells.row(cell).transpose();
      }
      out.cells.row(cell) = (sum * scale).transpose();
    }
  }
  return out;
}

enum class TokenOrigin { kTextual, kClass, kVisual };

template <typename Scalar>
struct TokenSequence {
  RowMatrixX<Scalar> tokens;  // one token per row
  std::vector<TokenOrigin> origins;

  Eigen::Index size() const { return tokens.rows(); }
};

template <typename Scalar>
TokenSequence<Scalar> AssemblePrompt(const RowMatrixX<Scalar>& textual,
                                     const EmbeddingVector<Scalar>& class_token,
                                     const VisualTokenGrid<Scalar>& visual) {
  if (visual.cell_count() == 0) {
    throw Error(ErrorCode::kShapeMismatch, "visual token grid is empty");
  }
  visual.Validate();
  const Eigen::Index dim = class_token.size();
  if ((textual.rows() > 0 && textual.cols() != dim) || visual.dim() != dim) {
    throw Error(ErrorCode::kDimensionMismatch, "prompt parts differ in token dimension");
  }
  TokenSequence<Scalar> seq;
  seq.tokens.resize(textual.rows() + 1 + visual.cell_count(), dim);
  if (textual.rows() > 0) seq.tokens.topRows(textual.rows()) = textual;
  seq.tokens.row(textual.rows()) = class_token.transpose();
  seq.tokens.bottomRows(visual.cell_count()) = visual.cells;
  seq.origins.assign(static_cast<std::size_t>(textual.rows()), TokenOrigin::kTextual);
  seq.origins.push_back(TokenOrigin::kClass);
  seq.origins.insert(seq.origins.end(), static_cast<std::size_t>(visual.cell_count()),
                     TokenOrigin::kVisual);
  return seq;
}

template <typename Scalar>
struct PromptParts {
  RowMatrixX<Scalar> textual;
  EmbeddingVector<Scalar> class_token;
  RowMatrixX<Scalar> visual;  // cells in row-major grid order
};

// Inverse of AssemblePrompt by origin tag.
template <typename Scalar>
PromptParts<Scalar> SplitPrompt(const TokenSequence<Scalar>& seq) {
  auto gather = [&](TokenOrigin origin) {
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < seq.origins.size(); ++i) {
      if (seq.origins[i] == origin) rows.push_back(static_cast<Eigen::Index>(i));
    }
    return RowMatrixX<Scalar>(seq.tokens(rows, Eigen::all));
  };
  PromptParts<Scalar> parts;
  parts.textual = gather(TokenOrigin::kTextual);
  const RowMatrixX<Scalar> cls = gather(TokenOrigin::kClass);
  if (cls.rows() != 1) {
    throw Error(ErrorCode::kShapeMismatch, "prompt must carry exactly one class token");
  }
  parts.class_token = cls.row(0).transpose();
  parts.visual = gather(TokenOrigin::kVisual);
  return parts;
}

// The fixed task description fed to the text encoder.
std::string_view CanonicalTaskDescription();
inline constexpr std::string_view kCanonicalTaskDescriptionSha256 =
    "3cd6650a5b4d66cb6f3b9fe726bac523cee134d76653cdffa6b31c88223f630f";

}  // namespace camoval

#endif  // CAMOVAL_FUSION_HPP_
