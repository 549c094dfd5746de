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

// Layout control images.
//
// Only the contrast control is computed here, and it is a documented
// stand-in: foreground pixels are copied verbatim; in training mode each
// background channel is pulled halfway towards its background mean, in
// inference mode the background is painted white. Depth and edge controls
// come from external models and are only decoded, resized and wrapped.

#ifndef CAMOVAL_CONTROLS_HPP_
#define CAMOVAL_CONTROLS_HPP_

#include <filesystem>
#include <string_view>

#include "camoval/corpus.hpp"
#include "camoval/fusion.hpp"

namespace camoval {

enum class ControlKind { kContrast, kDepth, kHed };

std::string_view ControlKindName(ControlKind kind);

struct ControlImage {
  ControlKind kind = ControlKind::kContrast;
  ImageBuffer image;
  RunMode mode = RunMode::kInference;
};

inline constexpr double kContrastLambda = 0.5;

// Throws kEmptyMask when the sample has no foreground.
ControlImage ContrastControl(const SampleRecord& sample, RunMode mode,
                             double lambda = kContrastLambda);

// Decodes an externally produced depth/HED map, replicates single-channel
// input to RGB and bilinearly resizes it to the sample. Throws kDecodeError.
ControlImage ValidateControl(const std::filesystem::path& image_path,
                             ControlKind kind, const SampleRecord& sample);

}  // namespace camoval

#endif  // CAMOVAL_CONTROLS_HPP_
