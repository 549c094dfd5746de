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

// On-disk manifest fixtures for command-level tests.

#ifndef CAMOVAL_TESTS_FIXTURES_HPP_
#define CAMOVAL_TESTS_FIXTURES_HPP_

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "camoval/corpus.hpp"
#include "generators.hpp"

namespace camoval::testing {

struct FixtureEntry {
  std::string id;
  ImageBuffer image;
  RegionMask mask;
  Subset subset = Subset::kCamouflaged;
  std::optional<ImageBuffer> reference;
};

// Writes <id>.png, <id>_mask.png (and <id>_ref.png) under `dir` plus a
// manifest with relative paths. Returns the manifest path.
inline std::filesystem::path WriteFixture(const std::filesystem::path& dir,
                                          const std::vector<FixtureEntry>& entries) {
  std::filesystem::create_directories(dir);
  std::ofstream manifest(dir / "manifest.jsonl");
  for (const auto& e : entries) {
    WriteImage(dir / (e.id + ".png"), e.image);
    WriteGray(dir / (e.id + "_mask.png"), MaskRaster(e.mask));
    nlohmann::json line = {{"id", e.id},
                           {"image_path", e.id + ".png"},
                           {"mask_path", e.id + "_mask.png"},
                           {"subset", SubsetName(e.subset)}};
    if (e.reference) {
      WriteImage(dir / (e.id + "_ref.png"), *e.reference);
      line["reference_path"] = e.id + "_ref.png";
    }
    manifest << line.dump() << "\n";
  }
  return dir / "manifest.jsonl";
}

inline std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace camoval::testing

#endif  // CAMOVAL_TESTS_FIXTURES_HPP_
