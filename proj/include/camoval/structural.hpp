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

#ifndef CAMOVAL_STRUCTURAL_HPP_
#define CAMOVAL_STRUCTURAL_HPP_

#include <Eigen/Core>

#include "camoval/corpus.hpp"

namespace camoval {

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;
};

struct SsimResult {
  double mean_ssim = 0.0;
  SsimParams params;
};

// Y = 0.299 R + 0.587 G + 0.114 B, unrounded. Rows index image y.
Eigen::MatrixXd Luminance(const ImageBuffer& image);

// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
Eigen::VectorXd GaussianTaps(int window, double sigma);

// Mean SSIM over every fully-contained window position (no padding).
// Throws kDimensionMismatch or kTooSmall (min side < window).
SsimResult Ssim(const ImageBuffer& a, const ImageBuffer& b,
                const SsimParams& params = {});
double SsimLuma(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                const SsimParams& params = {});

}  // namespace camoval

#endif  // CAMOVAL_STRUCTURAL_HPP_
