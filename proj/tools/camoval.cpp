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

// camoval: batch camouflage evaluation over dataset manifests.
//
//   camoval validate  --manifest m.jsonl [--out r.json]
//   camoval eval-gen  --manifest m.jsonl [--features-real a.cemb --features-gen b.cemb] --out r.json
//   camoval eval-cod  --manifest m.jsonl --pred-dir preds/ --out r.json
//   camoval retrieve  --target t.cemb --base kb.cemb [--mask m.png] [--k 3] --out r.json
//   camoval fuse      --target t.cemb --retrieved r.cemb --mask m.png --mode inference --out f.cemb
//   camoval controls  --manifest m.jsonl --mode training --out-dir controls/
//
// Exit status: 0 when no row failed, 1 when some rows failed, 2 on a fatal
// error (bad arguments, unreadable inputs).

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "camoval/commands.hpp"
#include "camoval/parallel.hpp"

namespace fs = std::filesystem;

namespace {

camoval::RunMode ParseMode(const std::string& s) {
  const auto mode = camoval::ParseRunMode(s);
  if (!mode) {
    throw camoval::Error(camoval::ErrorCode::kInvalidArgument,
                         "mode must be 'training' or 'inference', got '" + s + "'");
  }
  return *mode;
}

int Finish(const camoval::Report& report, const fs::path& out, int workers) {
  for (const auto& p : camoval::WriteReport(out, report, workers)) {
    std::cerr << "wrote " << p.string() << "\n";
  }
  if (report.failed > 0) {
    std::cerr << report.failed << " failed row(s); see the failures section\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Camouflage evaluation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", camoval::kToolkitVersion);

  std::optional<int> workers_flag;
  app.add_option("--workers", workers_flag,
                 "Worker threads, 0 = logical cores (CAMOVAL_WORKERS overrides)");

  fs::path manifest, out, out_dir, pred_dir;
  std::optional<fs::path> features_real, features_gen, mask_opt;
  fs::path target, base, retrieved, mask;
  std::optional<std::string> target_id;
  std::string mode = "inference";
  std::size_t k = camoval::kDefaultRetrievalK;
  camoval::EvalGenOptions gen;
  std::optional<std::uint64_t> seed;
  std::optional<int> block_size;
  double lambda = camoval::kContrastLambda;

  auto* validate = app.add_subcommand("validate", "Check manifest entries load");
  validate->add_option("--manifest", manifest, "JSONL manifest")->required();
  validate->add_option("--out", out, "Report path")->default_val("validate.json");

  auto* eval_gen = app.add_subcommand("eval-gen", "KL_BF, SSIM, FID and KID");
  eval_gen->add_option("--manifest", manifest, "JSONL manifest")->required();
  eval_gen->add_option("--features-real", features_real, "CEMB of real features");
  eval_gen->add_option("--features-gen", features_gen, "CEMB of generated features");
  eval_gen->add_option("--bins", gen.histogram.bins, "Histogram bins per channel")
      ->check(CLI::Range(1, 256));
  eval_gen->add_option("--epsilon", gen.histogram.epsilon, "Per-bin smoothing mass")
      ->check(CLI::PositiveNumber);
  eval_gen->add_option("--seed", seed, "KID block sampling seed");
  eval_gen->add_option("--kid-blocks", gen.kernel.blocks, "KID blocks")
      ->check(CLI::PositiveNumber);
  eval_gen->add_option("--kid-block-size", block_size, "KID block size");
  eval_gen->add_option("--out", out, "Report path")->required();

  auto* eval_cod = app.add_subcommand("eval-cod", "Five COD metrics against masks");
  eval_cod->add_option("--manifest", manifest, "Ground-truth manifest")->required();
  eval_cod->add_option("--pred-dir", pred_dir, "Directory of <id>.png predictions")
      ->required();
  eval_cod->add_option("--out", out, "Report path")->required();

  auto* retrieve = app.add_subcommand("retrieve", "Top-k background retrieval");
  retrieve->add_option("--target", target, "CEMB holding the target grid")->required();
  retrieve->add_option("--target-id", target_id, "Record id in the target CEMB");
  retrieve->add_option("--mask", mask_opt, "Target foreground mask PNG");
  retrieve->add_option("--base", base, "Knowledge-base CEMB with sidecar index")
      ->required();
  retrieve->add_option("--k", k, "Number of candidates")->default_val(k);
  retrieve->add_option("--out", out, "Report path")->required();

  auto* fuse = app.add_subcommand("fuse", "Fuse target and retrieved token grids");
  fuse->add_option("--target", target, "CEMB holding the target grid")->required();
  fuse->add_option("--target-id", target_id, "Record id in the target CEMB");
  fuse->add_option("--retrieved", retrieved, "CEMB of retrieved grids")->required();
  fuse->add_option("--mask", mask, "Target foreground mask PNG")->required();
  fuse->add_option("--mode", mode, "training or inference")->default_val(mode);
  fuse->add_option("--out", out, "Output CEMB")->required();

  auto* controls = app.add_subcommand("controls", "Contrast layout controls");
  controls->add_option("--manifest", manifest, "JSONL manifest")->required();
  controls->add_option("--mode", mode, "training or inference")->default_val(mode);
  controls->add_option("--lambda", lambda, "Training contraction factor")
      ->default_val(lambda);
  controls->add_option("--out-dir", out_dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const int workers = camoval::ResolveWorkers(workers_flag);
    if (validate->parsed()) {
      const auto report = camoval::Validate(manifest, workers);
      std::cout << report.body["valid_count"] << " valid, "
                << report.failed << " failed\n";
      return Finish(report, out, workers);
    }
    if (eval_gen->parsed()) {
      gen.manifest = manifest;
      gen.features_real = features_real;
      gen.features_gen = features_gen;
      gen.kernel.seed = seed.value_or(0);
      gen.kernel.block_size = block_size;
      gen.workers = workers;
      return Finish(camoval::EvalGen(gen), out, workers);
    }
    if (eval_cod->parsed()) {
      return Finish(camoval::EvalCod({manifest, pred_dir, workers}), out, workers);
    }
    if (retrieve->parsed()) {
      const auto report = camoval::Retrieve({target, target_id, mask_opt, base, k});
      for (const auto& c : report.body["ranked"]) {
        std::cout << c["rank"] << "\t" << c["id"].get<std::string>() << "\t"
                  << c["score"] << "\n";
      }
      return Finish(report, out, workers);
    }
    if (fuse->parsed()) {
      camoval::FuseOptions o{target, target_id, retrieved, mask, ParseMode(mode), out};
      auto report_path = out;
      report_path.replace_extension(".json");
      return Finish(camoval::Fuse(o), report_path, workers);
    }
    if (controls->parsed()) {
      camoval::ControlsOptions o{manifest, ParseMode(mode), lambda, out_dir, workers};
      return Finish(camoval::Controls(o), out_dir / "controls_report.json", workers);
    }
  } catch (const camoval::Error& e) {
    std::cerr << "error [" << camoval::ErrorCodeName(e.code()) << "]: " << e.what()
              << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
