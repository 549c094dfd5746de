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

#include "camoval/controls.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include "camoval/error.hpp"

namespace camoval {

std::string_view ControlKindName(ControlKind kind) {
  switch (kind) {
    case ControlKind::kContrast: return "contrast";
    case ControlKind::kDepth: return "depth";
    case ControlKind::kHed: return "hed";
  }
  return "unknown";
}

ControlImage ContrastControl(const SampleRecord& sample, RunMode mode,
                             double lambda) {
  const ImageBuffer& src = sample.image;
  const RegionMask& mask = sample.mask;
  if (src.width() != mask.width() || src.height() != mask.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "sample image and mask differ in size");
  }
  if (mask.foreground_count() == 0) {
    throw Error(ErrorCode::kEmptyMask, "contrast control needs a foreground");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "contrast lambda must lie in [0, 1]");
  }
  ControlImage out{ControlKind::kContrast, src, mode};
  if (mask.background_count() == 0) return out;

  const auto bits = mask.bits();
  auto pixels = out.image.data();
  if (mode == RunMode::kInference) {
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i]) continue;
      pixels[i * 3] = pixels[i * 3 + 1] = pixels[i * 3 + 2] = 255;
    }
    return out;
  }

  std::array<double, 3> mean{};
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) continue;
    for (std::size_t c = 0; c < 3; ++c) mean[c] += pixels[i * 3 + c];
  }
  for (double& m : mean) m /= static_cast<double>(mask.background_count());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) continue;
    for (std::size_t c = 0; c < 3; ++c) {
      const double v = mean[c] + lambda * (pixels[i * 3 + c] - mean[c]);
      pixels[i * 3 + c] = static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
    }
  }
  return out;
}

ControlImage ValidateControl(const std::filesystem::path& image_path,
                             ControlKind kind, const SampleRecord& sample) {
  if (kind == ControlKind::kContrast) {
    throw Error(ErrorCode::kInvalidArgument, "contrast controls are computed, not validated");
  }
  // DecodeImage replicates single-channel files to three channels.
  ImageBuffer decoded = DecodeImage(image_path);
  const int w = sample.image.width();
  const int h = sample.image.height();
  if (decoded.width() != w || decoded.height() != h) {
    cv::Mat src(decoded.height(), decoded.width(), CV_8UC3, decoded.data().data());
    cv::Mat dst;
    cv::resize(src, dst, cv::Size(w, h), 0, 0, cv::INTER_LINEAR);
    std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3);
    for (int y = 0; y < h; ++y) {
      const auto* row = dst.ptr<std::uint8_t>(y);
      std::copy(row, row + w * 3, data.begin() + static_cast<std::ptrdiff_t>(y) * w * 3);
    }
    decoded = ImageBuffer(w, h, std::move(data));
  }
  return ControlImage{kind, std::move(decoded), RunMode::kInference};
}

}  // namespace camoval
