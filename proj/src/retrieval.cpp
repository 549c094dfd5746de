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

#include "camoval/retrieval.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace camoval {

namespace {

// Overlap of pixel p with cell c along one axis, scaled by `cells` so that
// every quantity is an integer: |[p*cells, (p+1)*cells) n [c*pixels, (c+1)*pixels)|.
std::vector<std::int64_t> AxisOverlap(int pixels, int cells) {
  std::vector<std::int64_t> w(static_cast<std::size_t>(pixels) * cells, 0);
  for (int p = 0; p < pixels; ++p) {
    const std::int64_t lo = static_cast<std::int64_t>(p) * cells;
    const std::int64_t hi = lo + cells;
    for (int c = p * cells / pixels; c < cells; ++c) {
      const std::int64_t clo = static_cast<std::int64_t>(c) * pixels;
      if (clo >= hi) break;
      const std::int64_t overlap = std::min(hi, clo + pixels) - std::max(lo, clo);
      if (overlap > 0) w[static_cast<std::size_t>(p) * cells + c] = overlap;
    }
  }
  return w;
}

// Covered area per cell in units where a full cell has area h*w.
std::vector<std::int64_t> CoveredArea(const RegionMask& mask, int grid_h, int grid_w) {
  if (grid_h < 1 || grid_w < 1) {
    throw Error(ErrorCode::kShapeMismatch, "grid dimensions must be >= 1");
  }
  const auto rows = AxisOverlap(mask.height(), grid_h);
  const auto cols = AxisOverlap(mask.width(), grid_w);
  std::vector<std::int64_t> area(static_cast<std::size_t>(grid_h) * grid_w, 0);
  std::vector<std::int64_t> row_sum(static_cast<std::size_t>(grid_w));
  for (int y = 0; y < mask.height(); ++y) {
    std::fill(row_sum.begin(), row_sum.end(), 0);
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      for (int j = 0; j < grid_w; ++j) row_sum[j] += cols[static_cast<std::size_t>(x) * grid_w + j];
    }
    for (int i = 0; i < grid_h; ++i) {
      const std::int64_t oy = rows[static_cast<std::size_t>(y) * grid_h + i];
      if (oy == 0) continue;
      std::int64_t* out = &area[static_cast<std::size_t>(i) * grid_w];
      for (int j = 0; j < grid_w; ++j) out[j] += oy * row_sum[j];
    }
  }
  return area;
}

}  // namespace

Eigen::MatrixXd CellCoverage(const RegionMask& mask, int grid_h, int grid_w) {
  const auto area = CoveredArea(mask, grid_h, grid_w);
  const double full = static_cast<double>(mask.height()) * mask.width();
  Eigen::MatrixXd out(grid_h, grid_w);
  for (int i = 0; i < grid_h; ++i) {
    for (int j = 0; j < grid_w; ++j) {
      out(i, j) = static_cast<double>(area[static_cast<std::size_t>(i) * grid_w + j]) / full;
    }
  }
  return out;
}

Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> CellSelection(
    const RegionMask& mask, int grid_h, int grid_w) {
  const auto area = CoveredArea(mask, grid_h, grid_w);
  const std::int64_t full = static_cast<std::int64_t>(mask.height()) * mask.width();
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> out(grid_h, grid_w);
  for (int i = 0; i < grid_h; ++i) {
    for (int j = 0; j < grid_w; ++j) {
      out(i, j) = 2 * area[static_cast<std::size_t>(i) * grid_w + j] > full;
    }
  }
  return out;
}

}  // namespace camoval
