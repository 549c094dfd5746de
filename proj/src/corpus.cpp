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

#include "camoval/corpus.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "camoval/error.hpp"
#include "camoval/parallel.hpp"

namespace camoval {

namespace fs = std::filesystem;

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kDecodeError: return "DecodeError";
    case ErrorCode::kEmptyImage: return "EmptyImage";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kTooSmall: return "TooSmall";
    case ErrorCode::kEmptyRegion: return "EmptyRegion";
    case ErrorCode::kEmptyList: return "EmptyList";
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kEmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kNotSymmetric: return "NotSymmetric";
    case ErrorCode::kBlockTooLarge: return "BlockTooLarge";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kKOutOfRange: return "KOutOfRange";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptyRetrievalList: return "EmptyRetrievalList";
    case ErrorCode::kMissingPrediction: return "MissingPrediction";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

int ResolveWorkers(std::optional<int> flag) {
  if (const char* env = std::getenv("CAMOVAL_WORKERS"); env && *env) {
    const int value = std::atoi(env);
    if (value > 0) return value;
  }
  if (flag && *flag > 0) return *flag;
  return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------------------
// ImageBuffer / RegionMask

ImageBuffer::ImageBuffer(int width, int height)
    : ImageBuffer(width, height,
                  std::vector<std::uint8_t>(
                      static_cast<std::size_t>(std::max(width, 0)) *
                      static_cast<std::size_t>(std::max(height, 0)) * 3)) {}

ImageBuffer::ImageBuffer(int width, int height, std::vector<std::uint8_t> rgb)
    : width_(width), height_(height), data_(std::move(rgb)) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kEmptyImage, "image has zero area");
  }
  if (data_.size() != pixel_count() * 3) {
    throw Error(ErrorCode::kDimensionMismatch,
                "image data length does not match width*height*3");
  }
}

RegionMask::RegionMask(int width, int height)
    : RegionMask(width, height,
                 std::vector<std::uint8_t>(
                     static_cast<std::size_t>(std::max(width, 0)) *
                     static_cast<std::size_t>(std::max(height, 0)))) {}

RegionMask::RegionMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kEmptyImage, "mask has zero area");
  }
  if (bits_.size() != pixel_count()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "mask data length does not match width*height");
  }
  for (auto& b : bits_) {
    b = b != 0 ? 1 : 0;
    foreground_count_ += b;
  }
}

RegionMask RegionMask::FromGray(int width, int height,
                                std::span<const std::uint8_t> gray,
                                std::uint8_t threshold) {
  std::vector<std::uint8_t> bits(gray.size());
  std::transform(gray.begin(), gray.end(), bits.begin(),
                 [threshold](std::uint8_t v) { return v >= threshold ? 1 : 0; });
  return RegionMask(width, height, std::move(bits));
}

void RegionMask::set(int x, int y, bool fg) {
  auto& b = bits_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                  static_cast<std::size_t>(x)];
  const std::uint8_t v = fg ? 1 : 0;
  if (b == v) return;
  foreground_count_ = fg ? foreground_count_ + 1 : foreground_count_ - 1;
  b = v;
}

RegionMask RegionMask::Inverted() const {
  std::vector<std::uint8_t> bits(bits_.size());
  std::transform(bits_.begin(), bits_.end(), bits.begin(),
                 [](std::uint8_t b) { return static_cast<std::uint8_t>(1 - b); });
  return RegionMask(width_, height_, std::move(bits));
}

RegionMask RegionMask::ResizedNearest(int width, int height) const {
  if (width == width_ && height == height_) return *this;
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(width) *
                                 static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) {
    const int sy = static_cast<int>(static_cast<long long>(y) * height_ / height);
    for (int x = 0; x < width; ++x) {
      const int sx = static_cast<int>(static_cast<long long>(x) * width_ / width);
      bits[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x)] = at(sx, sy) ? 1 : 0;
    }
  }
  return RegionMask(width, height, std::move(bits));
}

std::string_view SubsetName(Subset subset) {
  switch (subset) {
    case Subset::kCamouflaged: return "camouflaged";
    case Subset::kSalient: return "salient";
    case Subset::kGeneral: return "general";
  }
  return "unknown";
}

std::optional<Subset> ParseSubset(std::string_view name) {
  for (Subset s : kAllSubsets) {
    if (SubsetName(s) == name) return s;
  }
  return std::nullopt;
}

std::string_view RunModeName(RunMode mode) {
  return mode == RunMode::kTraining ? "training" : "inference";
}

std::optional<RunMode> ParseRunMode(std::string_view name) {
  if (name == "training") return RunMode::kTraining;
  if (name == "inference") return RunMode::kInference;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Manifest

namespace {

fs::path Resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string RequiredString(const nlohmann::json& obj, const char* key,
                           std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw Error(ErrorCode::kParseError,
                "manifest line " + std::to_string(line_no) +
                    ": missing string field '" + key + "'");
  }
  return it->get<std::string>();
}

std::optional<fs::path> OptionalPath(const nlohmann::json& obj, const char* key,
                                     const fs::path& base, std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw Error(ErrorCode::kParseError, "manifest line " +
                                            std::to_string(line_no) + ": field '" +
                                            key + "' must be a string");
  }
  return Resolve(base, it->get<std::string>());
}

}  // namespace

DatasetManifest ParseManifest(std::string_view text, const fs::path& base_dir) {
  DatasetManifest manifest;
  manifest.base_dir = base_dir;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kParseError,
                  "manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!obj.is_object()) {
      throw Error(ErrorCode::kParseError,
                  "manifest line " + std::to_string(line_no) + ": not an object");
    }
    ManifestEntry entry;
    entry.id = RequiredString(obj, "id", line_no);
    entry.image_path = Resolve(base_dir, RequiredString(obj, "image_path", line_no));
    entry.mask_path = Resolve(base_dir, RequiredString(obj, "mask_path", line_no));
    const std::string subset = RequiredString(obj, "subset", line_no);
    auto parsed = ParseSubset(subset);
    if (!parsed) {
      throw Error(ErrorCode::kParseError, "manifest line " +
                                              std::to_string(line_no) +
                                              ": unknown subset '" + subset + "'");
    }
    entry.subset = *parsed;
    entry.reference_path = OptionalPath(obj, "reference_path", base_dir, line_no);
    entry.depth_path = OptionalPath(obj, "depth_path", base_dir, line_no);
    entry.hed_path = OptionalPath(obj, "hed_path", base_dir, line_no);
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

DatasetManifest ReadManifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open manifest " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseManifest(buf.str(), path.parent_path());
}

// ---------------------------------------------------------------------------
// Codecs

namespace {

cv::Mat ReadMat(const fs::path& path, int flags) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kIoError, "file not found: " + path.string());
  }
  cv::Mat mat = cv::imread(path.string(), flags);
  if (mat.empty()) {
    throw Error(ErrorCode::kDecodeError, "cannot decode " + path.string());
  }
  if (mat.rows < 1 || mat.cols < 1) {
    throw Error(ErrorCode::kEmptyImage, "zero-area raster: " + path.string());
  }
  if (mat.depth() != CV_8U) {
    mat.convertTo(mat, CV_8U);
  }
  return mat;
}

}  // namespace

ImageBuffer DecodeImage(const fs::path& path) {
  cv::Mat bgr = ReadMat(path, cv::IMREAD_COLOR);
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  std::vector<std::uint8_t> data(static_cast<std::size_t>(rgb.rows) *
                                 static_cast<std::size_t>(rgb.cols) * 3);
  for (int y = 0; y < rgb.rows; ++y) {
    const auto* row = rgb.ptr<std::uint8_t>(y);
    std::copy(row, row + rgb.cols * 3,
              data.begin() + static_cast<std::ptrdiff_t>(y) * rgb.cols * 3);
  }
  return ImageBuffer(rgb.cols, rgb.rows, std::move(data));
}

GrayRaster DecodeGray(const fs::path& path) {
  cv::Mat gray = ReadMat(path, cv::IMREAD_GRAYSCALE);
  GrayRaster out{gray.cols, gray.rows, {}};
  out.values.resize(static_cast<std::size_t>(gray.rows) *
                    static_cast<std::size_t>(gray.cols));
  for (int y = 0; y < gray.rows; ++y) {
    const auto* row = gray.ptr<std::uint8_t>(y);
    std::copy(row, row + gray.cols,
              out.values.begin() + static_cast<std::ptrdiff_t>(y) * gray.cols);
  }
  return out;
}

void WriteImage(const fs::path& path, const ImageBuffer& image) {
  cv::Mat rgb(image.height(), image.width(), CV_8UC3,
              const_cast<std::uint8_t*>(image.data().data()));
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  if (!cv::imwrite(path.string(), bgr)) {
    throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }
}

void WriteGray(const fs::path& path, const GrayRaster& gray) {
  cv::Mat mat(gray.height, gray.width, CV_8UC1,
              const_cast<std::uint8_t*>(gray.values.data()));
  if (!cv::imwrite(path.string(), mat)) {
    throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }
}

// ---------------------------------------------------------------------------
// Samples

SampleRecord LoadSample(const fs::path& image_path, const fs::path& mask_path) {
  SampleRecord record;
  record.image = DecodeImage(image_path);
  GrayRaster gray = DecodeGray(mask_path);
  const int w = record.image.width();
  const int h = record.image.height();
  if (gray.width != w || gray.height != h) {
    // Resample the raw raster, then binarize.
    std::vector<std::uint8_t> resized(record.image.pixel_count());
    for (int y = 0; y < h; ++y) {
      const int sy = static_cast<int>(static_cast<long long>(y) * gray.height / h);
      for (int x = 0; x < w; ++x) {
        const int sx = static_cast<int>(static_cast<long long>(x) * gray.width / w);
        resized[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                static_cast<std::size_t>(x)] =
            gray.values[static_cast<std::size_t>(sy) *
                            static_cast<std::size_t>(gray.width) +
                        static_cast<std::size_t>(sx)];
      }
    }
    gray = GrayRaster{w, h, std::move(resized)};
  }
  record.mask = RegionMask::FromGray(w, h, gray.values);
  return record;
}

SampleRecord LoadSample(const ManifestEntry& entry) {
  SampleRecord record = LoadSample(entry.image_path, entry.mask_path);
  record.id = entry.id;
  record.subset = entry.subset;
  return record;
}

ValidationReport ValidateManifest(const DatasetManifest& manifest, int workers) {
  const auto& entries = manifest.entries;
  std::vector<std::optional<std::string>> reasons(entries.size());

  std::set<std::string> seen;
  std::vector<bool> duplicate(entries.size(), false);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    duplicate[i] = !seen.insert(entries[i].id).second;
  }

  ParallelFor(entries.size(), workers, [&](std::size_t i) {
    const ManifestEntry& e = entries[i];
    std::error_code ec;
    if (duplicate[i]) {
      reasons[i] = "duplicate id";
      return;
    }
    if (!fs::is_regular_file(e.image_path, ec)) {
      reasons[i] = "image not found";
      return;
    }
    if (!fs::is_regular_file(e.mask_path, ec)) {
      reasons[i] = "mask not found";
      return;
    }
    if (e.reference_path && !fs::is_regular_file(*e.reference_path, ec)) {
      reasons[i] = "reference not found";
      return;
    }
    try {
      SampleRecord record = LoadSample(e);
      if (e.reference_path) {
        ImageBuffer ref = DecodeImage(*e.reference_path);
        if (ref.width() != record.image.width() ||
            ref.height() != record.image.height()) {
          reasons[i] = "reference dimensions differ from image";
        }
      }
    } catch (const Error& err) {
      reasons[i] = std::string(ErrorCodeName(err.code())) + ": " + err.what();
    }
  });

  ValidationReport report;
  for (Subset s : kAllSubsets) report.subset_counts[s] = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (reasons[i]) {
      report.failures.push_back({entries[i].id, *reasons[i]});
    } else {
      ++report.valid_count;
      ++report.subset_counts[entries[i].subset];
    }
  }
  return report;
}

}  // namespace camoval
