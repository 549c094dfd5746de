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

#include "camoval/structural.hpp"

#include <cmath>

#include "camoval/error.hpp"

namespace camoval {

namespace {

// Valid-mode separable filtering: out is (rows-w+1) x (cols-w+1).
Eigen::MatrixXd FilterValid(const Eigen::MatrixXd& in, const Eigen::VectorXd& taps) {
  const Eigen::Index w = taps.size();
  const Eigen::Index out_rows = in.rows() - w + 1;
  const Eigen::Index out_cols = in.cols() - w + 1;
  Eigen::MatrixXd horizontal(in.rows(), out_cols);
  for (Eigen::Index c = 0; c < out_cols; ++c) {
    horizontal.col(c) = in.middleCols(c, w) * taps;
  }
  Eigen::MatrixXd out(out_rows, out_cols);
  for (Eigen::Index r = 0; r < out_rows; ++r) {
    out.row(r) = taps.transpose() * horizontal.middleRows(r, w);
  }
  return out;
}

}  // namespace

Eigen::MatrixXd Luminance(const ImageBuffer& image) {
  Eigen::MatrixXd y(image.height(), image.width());
  for (int r = 0; r < image.height(); ++r) {
    for (int c = 0; c < image.width(); ++c) {
      y(r, c) = 0.299 * image.at(c, r, 0) + 0.587 * image.at(c, r, 1) +
                0.114 * image.at(c, r, 2);
    }
  }
  return y;
}

Eigen::VectorXd GaussianTaps(int window, double sigma) {
  Eigen::VectorXd taps(window);
  const double center = (window - 1) / 2.0;
  for (int i = 0; i < window; ++i) {
    const double d = i - center;
    taps(i) = std::exp(-(d * d) / (2.0 * sigma * sigma));
  }
  return taps / taps.sum();
}

double SsimLuma(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                const SsimParams& params) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "SSIM inputs differ in size");
  }
  if (std::min(a.rows(), a.cols()) < params.window) {
    throw Error(ErrorCode::kTooSmall,
                "SSIM needs both sides >= " + std::to_string(params.window));
  }
  const Eigen::VectorXd taps = GaussianTaps(params.window, params.sigma);
  const double c1 = std::pow(params.k1 * params.dynamic_range, 2);
  const double c2 = std::pow(params.k2 * params.dynamic_range, 2);

  const Eigen::ArrayXXd mu_a = FilterValid(a, taps).array();
  const Eigen::ArrayXXd mu_b = FilterValid(b, taps).array();
  const Eigen::ArrayXXd aa = FilterValid(a.cwiseProduct(a), taps).array();
  const Eigen::ArrayXXd bb = FilterValid(b.cwiseProduct(b), taps).array();
  const Eigen::ArrayXXd ab = FilterValid(a.cwiseProduct(b), taps).array();

  const Eigen::ArrayXXd var_a = aa - mu_a * mu_a;
  const Eigen::ArrayXXd var_b = bb - mu_b * mu_b;
  const Eigen::ArrayXXd cov = ab - mu_a * mu_b;

  const Eigen::ArrayXXd num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
  const Eigen::ArrayXXd den =
      (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
  return (num / den).mean();
}

SsimResult Ssim(const ImageBuffer& a, const ImageBuffer& b,
                const SsimParams& params) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "SSIM inputs differ in size");
  }
  return {SsimLuma(Luminance(a), Luminance(b), params), params};
}

}  // namespace camoval
