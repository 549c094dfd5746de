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

#ifndef CAMOVAL_CORPUS_HPP_
#define CAMOVAL_CORPUS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace camoval {

// 8-bit interleaved RGB raster, row-major.
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(int width, int height);
  ImageBuffer(int width, int height, std::vector<std::uint8_t> rgb);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  bool empty() const { return data_.empty(); }

  std::uint8_t at(int x, int y, int c) const {
    return data_[Offset(x, y) + static_cast<std::size_t>(c)];
  }
  std::uint8_t& at(int x, int y, int c) {
    return data_[Offset(x, y) + static_cast<std::size_t>(c)];
  }

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::size_t Offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

// Binary foreground mask; every entry is 0 or 1.
class RegionMask {
 public:
  RegionMask() = default;
  RegionMask(int width, int height);  // all background
  RegionMask(int width, int height, std::vector<std::uint8_t> bits);

  // Thresholds an 8-bit raster: values >= threshold become foreground.
  static RegionMask FromGray(int width, int height,
                             std::span<const std::uint8_t> gray,
                             std::uint8_t threshold = 128);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  std::size_t foreground_count() const { return foreground_count_; }
  std::size_t background_count() const {
    return pixel_count() - foreground_count_;
  }

  bool at(int x, int y) const {
    return bits_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                 static_cast<std::size_t>(x)] != 0;
  }
  void set(int x, int y, bool fg);

  std::span<const std::uint8_t> bits() const { return bits_; }

  RegionMask Inverted() const;
  // Nearest-neighbour resample; source index = floor(dst * src / dst_size).
  RegionMask ResizedNearest(int width, int height) const;

  friend bool operator==(const RegionMask&, const RegionMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
  std::size_t foreground_count_ = 0;
};

enum class Subset { kCamouflaged, kSalient, kGeneral };

inline constexpr Subset kAllSubsets[] = {Subset::kCamouflaged, Subset::kSalient,
                                         Subset::kGeneral};

std::string_view SubsetName(Subset subset);
std::optional<Subset> ParseSubset(std::string_view name);

// Training vs inference behaviour for visual fusion and layout controls.
enum class RunMode { kTraining, kInference };

std::string_view RunModeName(RunMode mode);
std::optional<RunMode> ParseRunMode(std::string_view name);

struct SampleRecord {
  std::string id;
  ImageBuffer image;
  RegionMask mask;
  Subset subset = Subset::kCamouflaged;
};

struct ManifestEntry {
  std::string id;
  std::filesystem::path image_path;  // resolved against the manifest directory
  std::filesystem::path mask_path;
  Subset subset = Subset::kCamouflaged;
  std::optional<std::filesystem::path> reference_path;
  // Externally produced layout controls, consumed by the controls command.
  std::optional<std::filesystem::path> depth_path;
  std::optional<std::filesystem::path> hed_path;
};

struct DatasetManifest {
  std::filesystem::path base_dir;
  std::vector<ManifestEntry> entries;
};

// One JSON object per line; blank lines and lines starting with '#' skipped.
// Relative paths resolve against `base_dir`. Throws kParseError.
DatasetManifest ParseManifest(std::string_view text,
                              const std::filesystem::path& base_dir);
DatasetManifest ReadManifest(const std::filesystem::path& path);

// Image file codecs (PNG/JPEG). Throw kDecodeError / kEmptyImage / kIoError.
ImageBuffer DecodeImage(const std::filesystem::path& path);
// Single-channel 8-bit raster as (width, height, values).
struct GrayRaster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> values;
};
GrayRaster DecodeGray(const std::filesystem::path& path);
void WriteImage(const std::filesystem::path& path, const ImageBuffer& image);
void WriteGray(const std::filesystem::path& path, const GrayRaster& gray);

// Loads an image/mask pair; the mask is resized (nearest) to the image when
// the dimensions differ and binarized at 128.
SampleRecord LoadSample(const std::filesystem::path& image_path,
                        const std::filesystem::path& mask_path);
SampleRecord LoadSample(const ManifestEntry& entry);

struct ValidationFailure {
  std::string id;
  std::string reason;
};

struct ValidationReport {
  std::size_t valid_count = 0;
  std::map<Subset, std::size_t> subset_counts;  // valid entries only
  std::vector<ValidationFailure> failures;      // manifest order
};

ValidationReport ValidateManifest(const DatasetManifest& manifest,
                                  int workers = 1);

}  // namespace camoval

#endif  // CAMOVAL_CORPUS_HPP_
