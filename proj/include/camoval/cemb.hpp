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

// CEMB: the embedding / token-grid / feature-set container.
//
// Layout (all integers little-endian):
//
//   offset  size  field
//        0     4  magic "CEMB"
//        4     2  u16 version (= 1)
//        6     4  u32 count
//       10     2  u16 grid_h
//       12     2  u16 grid_w
//       14     4  u32 dim
//       18     -  count * grid_h * grid_w * dim IEEE-754 float32, row-major
//
// Pooled vectors use grid_h = grid_w = 1. A sidecar index (`<file>.index`,
// JSON lines) maps record ordinals to sample ids:
//
//   {"meta": {"preprocessing": "...", ...}}      optional, first line
//   {"ordinal": 0, "id": "cam_0001"}             one per record
//   {"gap": "cam_0002", "reason": "..."}         skipped inputs

#ifndef CAMOVAL_CEMB_HPP_
#define CAMOVAL_CEMB_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace camoval {

inline constexpr std::uint16_t kCembVersion = 1;
inline constexpr std::size_t kCembHeaderBytes = 18;

using RowMatrixXf =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct CembFile {
  std::uint32_t count = 0;
  std::uint16_t grid_h = 1;
  std::uint16_t grid_w = 1;
  std::uint32_t dim = 0;
  std::vector<float> values;  // count * grid_h * grid_w * dim

  std::size_t cells() const {
    return static_cast<std::size_t>(grid_h) * grid_w;
  }
  std::size_t record_size() const { return cells() * dim; }

  // Record `i` as a (grid_h*grid_w) x dim row-major view.
  Eigen::Map<const RowMatrixXf> record(std::size_t i) const;
  // All records flattened to (count*grid_h*grid_w) x dim.
  Eigen::Map<const RowMatrixXf> rows() const;
};

// Throws kFormatError on malformed bytes.
std::vector<std::uint8_t> EncodeCemb(const CembFile& file);
CembFile DecodeCemb(std::span<const std::uint8_t> bytes);

CembFile ReadCemb(const std::filesystem::path& path);
void WriteCemb(const std::filesystem::path& path, const CembFile& file);

struct CembGap {
  std::string id;
  std::string reason;
};

struct CembIndex {
  std::map<std::string, std::string> meta;
  std::vector<std::string> ids;  // by ordinal
  std::vector<CembGap> gaps;
};

std::filesystem::path IndexPathFor(const std::filesystem::path& cemb_path);
CembIndex ParseCembIndex(std::string_view text);
std::string FormatCembIndex(const CembIndex& index);
CembIndex ReadCembIndex(const std::filesystem::path& path);
void WriteCembIndex(const std::filesystem::path& path, const CembIndex& index);

struct IndexedCemb {
  CembFile file;
  std::optional<CembIndex> index;  // present when the sidecar exists
  std::string sha256;              // digest of the CEMB bytes

  std::optional<std::size_t> find(const std::string& id) const;
};

// Reads a CEMB file and, when present, its sidecar. With `require_index`,
// a missing sidecar is an error; a present one must list `count` ids.
IndexedCemb LoadIndexedCemb(const std::filesystem::path& path,
                            bool require_index);

std::string Sha256Hex(std::span<const std::uint8_t> bytes);

}  // namespace camoval

#endif  // CAMOVAL_CEMB_HPP_
