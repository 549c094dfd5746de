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

// Segmentation scores for camouflaged / salient object detection maps:
// MAE, S-measure, mean E-measure, adaptive F-measure and weighted F-measure.
// Maps are Eigen arrays indexed (row, col); predictions lie in [0, 1].

#ifndef CAMOVAL_CODMETRICS_HPP_
#define CAMOVAL_CODMETRICS_HPP_

#include <span>
#include <vector>

#include <Eigen/Core>

#include "camoval/corpus.hpp"

namespace camoval {

struct PredictionMap {
  Eigen::ArrayXXd values;  // height x width, all in [0, 1]

  int width() const { return static_cast<int>(values.cols()); }
  int height() const { return static_cast<int>(values.rows()); }

  // 8-bit grayscale normalized by 255.
  static PredictionMap FromGray(const GrayRaster& gray);
  static PredictionMap FromMask(const RegionMask& mask);
};

struct CodScores {
  double mae = 0.0;
  double s_alpha = 0.0;
  double e_phi = 0.0;     // mean over 256 thresholds
  double f_beta = 0.0;    // adaptive threshold, beta^2 = 0.3
  double f_beta_w = 0.0;  // weighted, beta^2 = 1
};

inline constexpr double kFBetaSquared = 0.3;
inline constexpr double kWeightedFBetaSquared = 1.0;
inline constexpr double kSMeasureAlpha = 0.5;
inline constexpr int kEMeasureThresholds = 256;

// Mask as a 0/1 double array (height x width).
Eigen::ArrayXXd MaskToArray(const RegionMask& mask);

double Mae(const PredictionMap& pred, const RegionMask& gt);
double FMeasure(const PredictionMap& pred, const RegionMask& gt);
double SMeasure(const PredictionMap& pred, const RegionMask& gt);
double EMeasure(const PredictionMap& pred, const RegionMask& gt);
double WeightedFMeasure(const PredictionMap& pred, const RegionMask& gt);

// Enhanced-alignment score of one binary map against the ground truth.
double EnhancedAlignment(const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& binary,
                         const RegionMask& gt);

CodScores ScoreCod(const PredictionMap& pred, const RegionMask& gt);

struct CodPair {
  PredictionMap pred;
  RegionMask gt;
};

// Arithmetic means of per-pair scores; throws kEmptyList.
CodScores CodEvaluate(std::span<const CodPair> pairs);
CodScores MeanScores(std::span<const CodScores> scores);

// Exact Euclidean feature transform towards foreground pixels. For every
// pixel: squared distance to the nearest foreground pixel and that pixel's
// coordinates. Ties go to the smallest column, then the smallest row.
struct FeatureTransform {
  Eigen::ArrayXXd squared_distance;
  Eigen::ArrayXXi nearest_row;
  Eigen::ArrayXXi nearest_col;
};
FeatureTransform NearestForeground(const RegionMask& mask);

}  // namespace camoval

#endif  // CAMOVAL_CODMETRICS_HPP_
