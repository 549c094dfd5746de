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

// Batch commands behind the CLI. Each returns a Report; writing it is the
// caller's job. Per-entry failures become failed rows rather than exceptions.

#ifndef CAMOVAL_COMMANDS_HPP_
#define CAMOVAL_COMMANDS_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include "camoval/controls.hpp"
#include "camoval/corpus.hpp"
#include "camoval/divergence.hpp"
#include "camoval/featstats.hpp"
#include "camoval/report.hpp"
#include "camoval/structural.hpp"

namespace camoval {

inline constexpr std::size_t kDefaultRetrievalK = 3;

struct EvalGenOptions {
  std::filesystem::path manifest;
  std::optional<std::filesystem::path> features_real;
  std::optional<std::filesystem::path> features_gen;
  HistogramConfig histogram;
  SsimParams ssim;
  KernelConfig kernel;
  FrechetOptions frechet;
  int workers = 1;
};

// KL_BF per image, SSIM where a reference exists, FID/KID per subset and
// overall when both feature files are given. Throws only for unusable inputs
// (unreadable manifest, incompatible feature files).
Report EvalGen(const EvalGenOptions& options);

struct EvalCodOptions {
  std::filesystem::path manifest;
  std::filesystem::path pred_dir;  // <pred_dir>/<id>.png
  int workers = 1;
};

// Throws kMissingPrediction naming every id without a prediction file.
Report EvalCod(const EvalCodOptions& options);

struct RetrieveOptions {
  std::filesystem::path target;  // CEMB, token grid or pooled vector
  std::optional<std::string> target_id;  // default: record 0
  std::optional<std::filesystem::path> mask;  // default: whole image
  std::filesystem::path base;  // CEMB with sidecar index
  std::size_t k = kDefaultRetrievalK;
};

Report Retrieve(const RetrieveOptions& options);

struct FuseOptions {
  std::filesystem::path target;
  std::optional<std::string> target_id;
  std::filesystem::path retrieved;  // every record is one retrieved grid
  std::filesystem::path mask;
  RunMode mode = RunMode::kInference;
  std::filesystem::path out;  // CEMB with one record, plus sidecar
};

Report Fuse(const FuseOptions& options);

struct ControlsOptions {
  std::filesystem::path manifest;
  RunMode mode = RunMode::kInference;
  double lambda = kContrastLambda;
  std::filesystem::path out_dir;  // <id>_contrast.png and controls.jsonl
  int workers = 1;
};

inline constexpr const char* kControlsManifestName = "controls.jsonl";

Report Controls(const ControlsOptions& options);

Report Validate(const std::filesystem::path& manifest, int workers);

}  // namespace camoval

#endif  // CAMOVAL_COMMANDS_HPP_
