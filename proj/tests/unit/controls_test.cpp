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
#include <fstream>

#include "camoval/controls.hpp"
#include "camoval/error.hpp"
#include "generators.hpp"

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

double BackgroundStddev(const ImageBuffer& img, const RegionMask& m, int c) {
  long double s = 0, ss = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (m.at(x, y)) continue;
      s += img.at(x, y, c);
      ss += static_cast<long double>(img.at(x, y, c)) * img.at(x, y, c);
    }
  }
  const auto n = static_cast<long double>(m.background_count());
  return static_cast<double>(std::sqrt(std::max<long double>(0, ss / n - (s / n) * (s / n))));
}

TEST_CASE("hand example") {
  ImageBuffer img(3, 1);
  const int values[3] = {100, 200, 90};
  for (int x = 0; x < 3; ++x) {
    for (int c = 0; c < 3; ++c) img.at(x, 0, c) = static_cast<std::uint8_t>(values[x]);
  }
  RegionMask m(3, 1);
  m.set(2, 0, true);
  const ControlImage out = ContrastControl({"a", img, m}, RunMode::kTraining);
  CHECK(out.kind == ControlKind::kContrast);
  CHECK(out.image.at(0, 0, 0) == 125);
  CHECK(out.image.at(1, 0, 1) == 175);
  CHECK(out.image.at(2, 0, 2) == 90);
}

TEST_CASE("uniform backgrounds are a fixed point") {
  Rng rng(3);
  ImageBuffer img = testing::RandomImage(rng, 9, 7);
  const RegionMask m = testing::RectMask(9, 7, 2, 2, 5, 5);
  for (int y = 0; y < 7; ++y) {
    for (int x = 0; x < 9; ++x) {
      if (m.at(x, y)) continue;
      img.at(x, y, 0) = 10;
      img.at(x, y, 1) = 120;
      img.at(x, y, 2) = 240;
    }
  }
  const ControlImage once = ContrastControl({"a", img, m}, RunMode::kTraining);
  CHECK(once.image == img);
  CHECK(ContrastControl({"a", once.image, m}, RunMode::kTraining).image == img);
}

TEST_CASE("contract on random samples") {
  Rng rng(100);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = rng.Int(2, 40), h = rng.Int(2, 40);
    const ImageBuffer img = testing::RandomImage(rng, w, h);
    const RegionMask m = testing::RandomMixedMask(rng, w, h, rng.Uniform(0.1, 0.9));
    const ControlImage train = ContrastControl({"a", img, m}, RunMode::kTraining);
    const ControlImage infer = ContrastControl({"a", img, m}, RunMode::kInference);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int c = 0; c < 3; ++c) {
          if (m.at(x, y)) {
            REQUIRE(train.image.at(x, y, c) == img.at(x, y, c));
            REQUIRE(infer.image.at(x, y, c) == img.at(x, y, c));
          } else {
            REQUIRE(infer.image.at(x, y, c) == 255);
          }
        }
      }
    }
    for (int c = 0; c < 3; ++c) {
      CHECK(BackgroundStddev(train.image, m, c) <=
            kContrastLambda * BackgroundStddev(img, m, c) + 1.0);
    }
  }
}

TEST_CASE("contrast preconditions") {
  Rng rng(4);
  const ImageBuffer img = testing::RandomImage(rng, 4, 4);
  CHECK(CodeOf([&] { ContrastControl({"a", img, RegionMask(4, 4)}, RunMode::kTraining); }) ==
        ErrorCode::kEmptyMask);
  CHECK(CodeOf([&] { ContrastControl({"a", img, RegionMask(3, 4)}, RunMode::kTraining); }) ==
        ErrorCode::kDimensionMismatch);
  const RegionMask m = testing::RectMask(4, 4, 0, 0, 2, 2);
  CHECK(CodeOf([&] { ContrastControl({"a", img, m}, RunMode::kTraining, 1.5); }) ==
        ErrorCode::kInvalidArgument);
  // All-foreground samples come back unchanged.
  const RegionMask full = RegionMask(4, 4).Inverted();
  CHECK(ContrastControl({"a", img, full}, RunMode::kInference).image == img);
}

TEST_CASE("external controls are decoded and resized") {
  testing::TempDir dir("controls");
  Rng rng(5);
  const SampleRecord sample{"s", testing::RandomImage(rng, 16, 12),
                            testing::RectMask(16, 12, 0, 0, 4, 4)};

  GrayRaster same{16, 12, std::vector<std::uint8_t>(16 * 12)};
  for (std::size_t i = 0; i < same.values.size(); ++i) same.values[i] = static_cast<std::uint8_t>(i);
  WriteGray(dir.path() / "depth.png", same);
  const ControlImage depth = ValidateControl(dir.path() / "depth.png", ControlKind::kDepth, sample);
  CHECK(depth.kind == ControlKind::kDepth);
  REQUIRE(depth.image.width() == 16);
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x < 16; ++x) {
      for (int c = 0; c < 3; ++c) CHECK(depth.image.at(x, y, c) == same.values[y * 16 + x]);
    }
  }

  GrayRaster flat{8, 6, std::vector<std::uint8_t>(48, 77)};
  WriteGray(dir.path() / "hed.png", flat);
  const ControlImage hed = ValidateControl(dir.path() / "hed.png", ControlKind::kHed, sample);
  CHECK(hed.image.width() == 16);
  CHECK(hed.image.height() == 12);
  CHECK(hed.image == ImageBuffer(16, 12, std::vector<std::uint8_t>(16 * 12 * 3, 77)));

  std::ofstream(dir.path() / "bad.png") << "not a png";
  CHECK(CodeOf([&] { ValidateControl(dir.path() / "bad.png", ControlKind::kHed, sample); }) ==
        ErrorCode::kDecodeError);
  CHECK(CodeOf([&] { ValidateControl(dir.path() / "hed.png", ControlKind::kContrast, sample); }) ==
        ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace camoval
