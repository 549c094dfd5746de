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

#include "camoval/commands.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <vector>

#include "camoval/cemb.hpp"
#include "camoval/codmetrics.hpp"
#include "camoval/fusion.hpp"
#include "camoval/parallel.hpp"
#include "camoval/retrieval.hpp"

namespace camoval {

namespace {

using nlohmann::json;

Error CurrentError() {
  try {
    throw;
  } catch (const Error& e) {
    return e;
  } catch (const std::exception& e) {
    return Error(ErrorCode::kInvalidArgument, e.what());
  }
}

std::string FileSha256(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                        std::istreambuf_iterator<char>());
  return Sha256Hex(bytes);
}

json FailureJson(const std::string& scope, const Error& e) {
  json j = ErrorJson(e);
  j["scope"] = scope;
  return j;
}

std::vector<std::string> ScopeNames(const DatasetManifest& manifest) {
  std::set<Subset> present;
  for (const auto& e : manifest.entries) present.insert(e.subset);
  std::vector<std::string> names;
  for (Subset s : kAllSubsets) {
    if (present.count(s)) names.emplace_back(SubsetName(s));
  }
  names.emplace_back("overall");
  return names;
}

bool InScope(const std::string& scope, Subset subset) {
  return scope == "overall" || scope == SubsetName(subset);
}

json StatsJson(const std::vector<double>& values) {
  if (values.empty()) {
    return {{"mean", nullptr}, {"median", nullptr}, {"stddev", nullptr}};
  }
  const SummaryStats s = Summarize(values);
  return {{"mean", s.mean}, {"median", s.median}, {"stddev", s.stddev}};
}

// ---------------------------------------------------------------------------
// Feature sets

struct FeatureSet {
  std::filesystem::path path;
  IndexedCemb data;
  Eigen::MatrixXd rows;  // one flattened record per row
};

FeatureSet LoadFeatureSet(const std::filesystem::path& path) {
  FeatureSet set{path, LoadIndexedCemb(path, false), {}};
  const auto& f = set.data.file;
  set.rows = Eigen::Map<const RowMatrixXf>(f.values.data(), f.count,
                                           static_cast<Eigen::Index>(f.record_size()))
                 .cast<double>();
  return set;
}

json FeatureSetJson(const FeatureSet& set, const char* partition) {
  const auto& f = set.data.file;
  json j = {{"path", set.path.string()}, {"sha256", set.data.sha256},
            {"count", f.count},          {"grid_h", f.grid_h},
            {"grid_w", f.grid_w},        {"dim", f.dim},
            {"indexed", set.data.index.has_value()},
            {"partition", partition}};
  json meta = json::object();
  if (set.data.index) {
    for (const auto& [k, v] : set.data.index->meta) meta[k] = v;
  }
  j["meta"] = meta;
  return j;
}

// Row indices per scope. A set whose ids do not overlap the manifest is used
// whole for every scope.
std::map<std::string, std::vector<Eigen::Index>> PartitionRows(
    const FeatureSet& set, const std::map<std::string, Subset>& subset_of,
    const std::vector<std::string>& scopes, bool& by_id) {
  std::map<std::string, std::vector<Eigen::Index>> out;
  by_id = false;
  if (set.data.index) {
    for (const auto& id : set.data.index->ids) {
      if (subset_of.count(id)) by_id = true;
    }
  }
  for (const auto& scope : scopes) {
    auto& rows = out[scope];
    for (Eigen::Index i = 0; i < set.rows.rows(); ++i) {
      if (!by_id || scope == "overall") {
        rows.push_back(i);
        continue;
      }
      const auto it = subset_of.find(set.data.index->ids[static_cast<std::size_t>(i)]);
      if (it != subset_of.end() && InScope(scope, it->second)) rows.push_back(i);
    }
  }
  return out;
}

json SetMetrics(const Eigen::MatrixXd& real, const Eigen::MatrixXd& gen,
                const EvalGenOptions& options, const std::string& scope,
                json& failures) {
  json j = {{"real_count", real.rows()}, {"gen_count", gen.rows()},
            {"fid", nullptr}, {"fid_jittered", nullptr}, {"kid", nullptr}};
  try {
    const auto s_real = ComputeGaussianStats(real);
    const auto s_gen = ComputeGaussianStats(gen);
    const auto fid = FrechetDistanceDetailed(s_real, s_gen, options.frechet);
    j["fid"] = JsonNumber(fid.distance);
    j["fid_jittered"] = fid.jittered;
  } catch (...) {
    failures.push_back(FailureJson("fid:" + scope, CurrentError()));
  }
  try {
    const KidResult kid = KidMmd2(real, gen, options.kernel);
    j["kid"] = {{"mean", kid.mean},
                {"stddev", kid.stddev},
                {"block_size", kid.block_size},
                {"blocks", kid.blocks},
                {"gamma", kid.gamma},
                {"block_values", kid.block_values}};
  } catch (...) {
    failures.push_back(FailureJson("kid:" + scope, CurrentError()));
  }
  return j;
}

// ---------------------------------------------------------------------------
// eval-gen rows

struct GenRow {
  std::optional<KlbfResult> klbf;
  std::optional<double> ssim;
  std::optional<Error> error;
};

GenRow EvaluateEntry(const ManifestEntry& entry, const EvalGenOptions& options) {
  GenRow row;
  try {
    const SampleRecord sample = LoadSample(entry);
    row.klbf = Klbf(sample.image, sample.mask, options.histogram);
    if (entry.reference_path) {
      const ImageBuffer reference = DecodeImage(*entry.reference_path);
      row.ssim = Ssim(sample.image, reference, options.ssim).mean_ssim;
    }
  } catch (...) {
    row = GenRow{};
    row.error = CurrentError();
  }
  return row;
}

json EvalGenConfig(const EvalGenOptions& o) {
  const auto& k = o.kernel;
  return {
      {"klbf",
       {{"bins", o.histogram.bins},
        {"epsilon", o.histogram.epsilon},
        {"direction", "KL(background || foreground), nats, mean of R, G, B"},
        {"mask", "nearest resize to image size, foreground where gray >= 128"}}},
      {"ssim",
       {{"window", o.ssim.window},
        {"sigma", o.ssim.sigma},
        {"k1", o.ssim.k1},
        {"k2", o.ssim.k2},
        {"dynamic_range", o.ssim.dynamic_range},
        {"channel", "luminance 0.299 R + 0.587 G + 0.114 B"},
        {"windows", "valid positions only, no padding"}}},
      {"kid",
       {{"degree", k.degree},
        {"gamma", k.gamma ? json(*k.gamma) : json("1/D")},
        {"coef0", k.coef0},
        {"block_size", k.block_size ? json(*k.block_size) : json("min(1000, N)")},
        {"blocks", k.blocks},
        {"seed", k.seed},
        {"stddev", "population over blocks"},
        {"negative_values", "reported as computed"}}},
      {"fid",
       {{"jitter", o.frechet.jitter},
        {"residual_tolerance", o.frechet.residual_tolerance},
        {"covariance", "unbiased (N-1)"}}},
  };
}

// ---------------------------------------------------------------------------
// Grids

std::size_t PickRecord(const IndexedCemb& cemb, const std::optional<std::string>& id) {
  if (cemb.file.count == 0) throw Error(ErrorCode::kEmptyList, "CEMB file has no records");
  if (!id) return 0;
  const auto found = cemb.find(*id);
  if (!found) throw Error(ErrorCode::kInvalidArgument, "id '" + *id + "' not in index");
  return *found;
}

template <typename Scalar>
FeatureGrid<Scalar> GridOf(const CembFile& file, std::size_t record) {
  FeatureGrid<Scalar> grid;
  grid.grid_h = file.grid_h;
  grid.grid_w = file.grid_w;
  grid.cells = file.record(record).template cast<Scalar>();
  return grid;
}

std::string RecordId(const IndexedCemb& cemb, std::size_t record) {
  if (cemb.index) return cemb.index->ids[record];
  return "#" + std::to_string(record);
}

RegionMask LoadMask(const std::filesystem::path& path) {
  const GrayRaster gray = DecodeGray(path);
  return RegionMask::FromGray(gray.width, gray.height, gray.values);
}

bool IsPlainFileName(const std::string& id) {
  return !id.empty() && id != "." && id != ".." &&
         id.find_first_of("/\\") == std::string::npos;
}

}  // namespace

// ---------------------------------------------------------------------------
// eval-gen

Report EvalGen(const EvalGenOptions& options) {
  const DatasetManifest manifest = ReadManifest(options.manifest);
  const auto scopes = ScopeNames(manifest);

  std::vector<GenRow> rows(manifest.entries.size());
  ParallelFor(rows.size(), options.workers, [&](std::size_t i) {
    rows[i] = EvaluateEntry(manifest.entries[i], options);
  });

  Report report;
  report.command = "eval-gen";
  json failures = json::array();
  json row_json = json::array();
  Table& row_table = report.tables["rows"];
  row_table.columns = {"id",  "subset", "status", "kl_r", "kl_g", "kl_b", "kl_bf",
                       "foreground_pixels", "background_pixels", "ssim",
                       "error_code", "error_message"};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& e = manifest.entries[i];
    const auto& r = rows[i];
    json j = {{"id", e.id}, {"subset", SubsetName(e.subset)}};
    std::vector<std::string> csv{e.id, std::string(SubsetName(e.subset))};
    if (r.error) {
      j["status"] = "failed";
      j["error"] = ErrorJson(*r.error);
      failures.push_back(FailureJson(e.id, *r.error));
      csv.insert(csv.end(), {"failed", "", "", "", "", "", "", "",
                             std::string(ErrorCodeName(r.error->code())),
                             r.error->what()});
    } else {
      const auto& k = *r.klbf;
      j["status"] = "ok";
      j["kl_r"] = k.kl_r;
      j["kl_g"] = k.kl_g;
      j["kl_b"] = k.kl_b;
      j["kl_bf"] = k.kl_bf;
      j["foreground_pixels"] = k.foreground_pixels;
      j["background_pixels"] = k.background_pixels;
      j["ssim"] = JsonNumber(r.ssim);
      csv.insert(csv.end(), {"ok", FormatNumber(k.kl_r), FormatNumber(k.kl_g),
                             FormatNumber(k.kl_b), FormatNumber(k.kl_bf),
                             std::to_string(k.foreground_pixels),
                             std::to_string(k.background_pixels),
                             FormatNumber(r.ssim), "", ""});
    }
    row_json.push_back(j);
    row_table.rows.push_back(std::move(csv));
  }
  const std::size_t failed_rows = failures.size();

  // Per-image aggregates, folded in manifest order.
  json aggregates = json::object();
  for (const auto& scope : scopes) {
    std::vector<double> kl_bf, kl_r, kl_g, kl_b, ssim;
    std::size_t count = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!InScope(scope, manifest.entries[i].subset)) continue;
      ++count;
      if (!rows[i].klbf) continue;
      kl_bf.push_back(rows[i].klbf->kl_bf);
      kl_r.push_back(rows[i].klbf->kl_r);
      kl_g.push_back(rows[i].klbf->kl_g);
      kl_b.push_back(rows[i].klbf->kl_b);
      if (rows[i].ssim) ssim.push_back(*rows[i].ssim);
    }
    aggregates[scope] = {{"count", count},
                         {"ok", kl_bf.size()},
                         {"failed", count - kl_bf.size()},
                         {"kl_bf", StatsJson(kl_bf)},
                         {"kl_r", StatsJson(kl_r)},
                         {"kl_g", StatsJson(kl_g)},
                         {"kl_b", StatsJson(kl_b)},
                         {"ssim", {{"count", ssim.size()},
                                   {"mean", ssim.empty() ? json(nullptr)
                                                         : json(Summarize(ssim).mean)}}},
                         {"fid", nullptr},
                         {"kid", nullptr}};
  }

  json inputs = {{"manifest", options.manifest.string()},
                 {"manifest_sha256", FileSha256(options.manifest)},
                 {"entries", manifest.entries.size()}};

  // Set-level distances.
  if (options.features_real.has_value() != options.features_gen.has_value()) {
    throw Error(ErrorCode::kInvalidArgument,
                "--features-real and --features-gen must be given together");
  }
  if (options.features_real) {
    const FeatureSet real = LoadFeatureSet(*options.features_real);
    const FeatureSet gen = LoadFeatureSet(*options.features_gen);
    if (real.rows.cols() != gen.rows.cols()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "feature files differ in record size (" +
                      std::to_string(real.rows.cols()) + " vs " +
                      std::to_string(gen.rows.cols()) + ")");
    }
    std::map<std::string, Subset> subset_of;
    for (const auto& e : manifest.entries) subset_of[e.id] = e.subset;
    bool real_by_id = false;
    bool gen_by_id = false;
    const auto real_rows = PartitionRows(real, subset_of, scopes, real_by_id);
    const auto gen_rows = PartitionRows(gen, subset_of, scopes, gen_by_id);
    inputs["features_real"] = FeatureSetJson(real, real_by_id ? "by_id" : "whole");
    inputs["features_gen"] = FeatureSetJson(gen, gen_by_id ? "by_id" : "whole");
    for (const auto& scope : scopes) {
      // Without ids on the generated side only the overall distance means
      // anything.
      if (scope != "overall" && !gen_by_id) continue;
      const Eigen::MatrixXd r = real.rows(real_rows.at(scope), Eigen::all);
      const Eigen::MatrixXd g = gen.rows(gen_rows.at(scope), Eigen::all);
      const json m = SetMetrics(r, g, options, scope, failures);
      aggregates[scope]["fid"] = m["fid"];
      aggregates[scope]["fid_jittered"] = m["fid_jittered"];
      aggregates[scope]["kid"] = m["kid"];
      aggregates[scope]["real_count"] = m["real_count"];
      aggregates[scope]["gen_count"] = m["gen_count"];
    }
  }

  Table& agg_table = report.tables["aggregates"];
  agg_table.columns = {"scope",        "count",         "ok",        "failed",
                       "kl_bf_mean",   "kl_bf_median",  "kl_bf_stddev",
                       "ssim_mean",    "ssim_count",    "fid",
                       "kid_mean",     "kid_stddev"};
  auto num = [](const json& v) {
    return v.is_number() ? FormatNumber(v.get<double>()) : std::string();
  };
  for (const auto& scope : scopes) {
    const json& a = aggregates[scope];
    const json& kid = a["kid"];
    agg_table.rows.push_back(
        {scope, std::to_string(a["count"].get<std::size_t>()),
         std::to_string(a["ok"].get<std::size_t>()),
         std::to_string(a["failed"].get<std::size_t>()), num(a["kl_bf"]["mean"]),
         num(a["kl_bf"]["median"]), num(a["kl_bf"]["stddev"]),
         num(a["ssim"]["mean"]), std::to_string(a["ssim"]["count"].get<std::size_t>()),
         num(a["fid"]), kid.is_object() ? num(kid["mean"]) : "",
         kid.is_object() ? num(kid["stddev"]) : ""});
  }

  report.body = {{"config", EvalGenConfig(options)},
                 {"inputs", inputs},
                 {"rows", row_json},
                 {"aggregates", aggregates},
                 {"failures", failures},
                 {"failed_rows", failed_rows}};
  report.failed = failures.size();
  return report;
}

// ---------------------------------------------------------------------------
// eval-cod

Report EvalCod(const EvalCodOptions& options) {
  const DatasetManifest manifest = ReadManifest(options.manifest);
  std::vector<std::string> missing;
  for (const auto& e : manifest.entries) {
    if (!std::filesystem::is_regular_file(options.pred_dir / (e.id + ".png"))) {
      missing.push_back(e.id);
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw Error(ErrorCode::kMissingPrediction, "no prediction for: " + list);
  }

  struct CodRow {
    std::optional<CodScores> scores;
    std::optional<Error> error;
  };
  std::vector<CodRow> rows(manifest.entries.size());
  ParallelFor(rows.size(), options.workers, [&](std::size_t i) {
    const auto& e = manifest.entries[i];
    try {
      const RegionMask gt = LoadMask(e.mask_path);
      const PredictionMap pred =
          PredictionMap::FromGray(DecodeGray(options.pred_dir / (e.id + ".png")));
      rows[i].scores = ScoreCod(pred, gt);
    } catch (...) {
      rows[i].error = CurrentError();
    }
  });

  Report report;
  report.command = "eval-cod";
  json row_json = json::array();
  json failures = json::array();
  Table& row_table = report.tables["rows"];
  row_table.columns = {"id",     "subset",   "status",       "mae",
                       "s_alpha", "e_phi_mean", "f_beta_adaptive", "f_beta_w",
                       "error_code", "error_message"};
  auto scores_json = [](const CodScores& s) {
    return json{{"mae", s.mae},
                {"s_alpha", s.s_alpha},
                {"e_phi_mean", s.e_phi},
                {"f_beta_adaptive", s.f_beta},
                {"f_beta_w", s.f_beta_w}};
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& e = manifest.entries[i];
    json j = {{"id", e.id}, {"subset", SubsetName(e.subset)}};
    std::vector<std::string> csv{e.id, std::string(SubsetName(e.subset))};
    if (rows[i].error) {
      j["status"] = "failed";
      j["error"] = ErrorJson(*rows[i].error);
      failures.push_back(FailureJson(e.id, *rows[i].error));
      csv.insert(csv.end(), {"failed", "", "", "", "", "",
                             std::string(ErrorCodeName(rows[i].error->code())),
                             rows[i].error->what()});
    } else {
      const auto& s = *rows[i].scores;
      j["status"] = "ok";
      j["scores"] = scores_json(s);
      csv.insert(csv.end(), {"ok", FormatNumber(s.mae), FormatNumber(s.s_alpha),
                             FormatNumber(s.e_phi), FormatNumber(s.f_beta),
                             FormatNumber(s.f_beta_w), "", ""});
    }
    row_json.push_back(j);
    row_table.rows.push_back(std::move(csv));
  }

  json aggregates = json::object();
  Table& agg_table = report.tables["aggregates"];
  agg_table.columns = {"scope", "count", "ok", "mae", "s_alpha", "e_phi_mean",
                       "f_beta_adaptive", "f_beta_w"};
  for (const auto& scope : ScopeNames(manifest)) {
    std::vector<CodScores> ok;
    std::size_t count = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!InScope(scope, manifest.entries[i].subset)) continue;
      ++count;
      if (rows[i].scores) ok.push_back(*rows[i].scores);
    }
    json a = {{"count", count}, {"ok", ok.size()}, {"means", nullptr}};
    std::vector<std::string> csv{scope, std::to_string(count), std::to_string(ok.size())};
    if (!ok.empty()) {
      const CodScores m = MeanScores(ok);
      a["means"] = scores_json(m);
      csv.insert(csv.end(), {FormatNumber(m.mae), FormatNumber(m.s_alpha),
                             FormatNumber(m.e_phi), FormatNumber(m.f_beta),
                             FormatNumber(m.f_beta_w)});
    } else {
      csv.insert(csv.end(), 5, "");
    }
    aggregates[scope] = a;
    agg_table.rows.push_back(std::move(csv));
  }

  report.body = {
      {"config",
       {{"f_beta", {{"beta_squared", kFBetaSquared},
                    {"threshold", "adaptive: min(1, 2 * mean(pred)); ties count as "
                                  "foreground, zeros never do"}}},
        {"f_beta_w", {{"beta_squared", kWeightedFBetaSquared},
                      {"blur", "7x7 Gaussian, sigma 5, zero padding"},
                      {"distance_weight", "2 - exp(ln(0.5) / 5 * d)"}}},
        {"s_alpha", {{"alpha", kSMeasureAlpha}}},
        {"e_phi", {{"variant", "mean over thresholds"},
                   {"thresholds", kEMeasureThresholds},
                   {"binarization", "pred >= i / 255 for i in 0..255"}}},
        {"ground_truth", "foreground where gray >= 128"},
        {"prediction", "8-bit gray / 255"}}},
      {"inputs", {{"manifest", options.manifest.string()},
                  {"manifest_sha256", FileSha256(options.manifest)},
                  {"pred_dir", options.pred_dir.string()}}},
      {"rows", row_json},
      {"aggregates", aggregates},
      {"failures", failures},
      {"failed_rows", failures.size()}};
  report.failed = failures.size();
  return report;
}

// ---------------------------------------------------------------------------
// retrieve

Report Retrieve(const RetrieveOptions& options) {
  const IndexedCemb target = LoadIndexedCemb(options.target, false);
  const IndexedCemb base = LoadIndexedCemb(options.base, true);
  const std::size_t record = PickRecord(target, options.target_id);
  if (target.file.dim != base.file.dim) {
    throw Error(ErrorCode::kDimensionMismatch, "target and base differ in dimension");
  }

  const FeatureGrid<double> grid = GridOf<double>(target.file, record);
  EmbeddingVector<double> query;
  if (options.mask) {
    query = MaskedAvgPool(grid, LoadMask(*options.mask));
  } else {
    query = GlobalAvgPool(grid);
  }

  KnowledgeBase<double> kb;
  kb.ids = base.index->ids;
  kb.embeddings.resize(base.file.count, base.file.dim);
  for (std::size_t i = 0; i < base.file.count; ++i) {
    kb.embeddings.row(static_cast<Eigen::Index>(i)) =
        GlobalAvgPool(GridOf<double>(base.file, i)).transpose();
  }
  const RetrievalResult result = RetrieveTopK(query, kb, options.k);

  Report report;
  report.command = "retrieve";
  json ranked = json::array();
  Table& table = report.tables["ranked"];
  table.columns = {"rank", "id", "score"};
  for (std::size_t r = 0; r < result.ranked.size(); ++r) {
    const auto& c = result.ranked[r];
    ranked.push_back({{"rank", r + 1}, {"id", c.id}, {"score", c.score}});
    table.rows.push_back({std::to_string(r + 1), c.id, FormatNumber(c.score)});
  }
  report.body = {
      {"config", {{"k", options.k},
                  {"target_pooling", options.mask ? "masked" : "global"},
                  {"base_pooling", "global"},
                  {"mask_cells", "foreground where cell coverage > 0.5, exact"},
                  {"score", "cosine similarity"},
                  {"ties", "lower id first"}}},
      {"inputs", {{"target", {{"path", options.target.string()},
                              {"sha256", target.sha256},
                              {"record", record},
                              {"id", RecordId(target, record)}}},
                  {"base", {{"path", options.base.string()},
                            {"sha256", base.sha256},
                            {"count", base.file.count}}},
                  {"mask", options.mask ? json(options.mask->string()) : json(nullptr)}}},
      {"ranked", ranked}};
  return report;
}

// ---------------------------------------------------------------------------
// fuse

Report Fuse(const FuseOptions& options) {
  const IndexedCemb target = LoadIndexedCemb(options.target, false);
  const IndexedCemb retrieved = LoadIndexedCemb(options.retrieved, false);
  const std::size_t record = PickRecord(target, options.target_id);
  const RegionMask mask = LoadMask(options.mask);

  const FeatureGrid<float> t = GridOf<float>(target.file, record);
  std::vector<FeatureGrid<float>> grids;
  for (std::size_t i = 0; i < retrieved.file.count; ++i) {
    grids.push_back(GridOf<float>(retrieved.file, i));
  }
  const FeatureGrid<float> fused =
      FuseVisual<float>(t, std::span<const FeatureGrid<float>>(grids), mask, options.mode);

  CembFile out;
  out.count = 1;
  out.grid_h = target.file.grid_h;
  out.grid_w = target.file.grid_w;
  out.dim = target.file.dim;
  out.values.assign(fused.cells.data(), fused.cells.data() + fused.cells.size());
  WriteCemb(options.out, out);

  std::string retrieved_ids;
  for (std::size_t i = 0; i < retrieved.file.count; ++i) {
    retrieved_ids += (i ? "," : "") + RecordId(retrieved, i);
  }
  CembIndex index;
  index.meta = {{"mode", std::string(RunModeName(options.mode))},
                {"retrieved", retrieved_ids},
                {"target_sha256", target.sha256}};
  index.ids = {RecordId(target, record)};
  WriteCembIndex(IndexPathFor(options.out), index);

  const auto fg = CellSelection(mask, t.grid_h, t.grid_w);
  Report report;
  report.command = "fuse";
  report.body = {
      {"config", {{"mode", RunModeName(options.mode)}, {"k", grids.size()}}},
      {"inputs", {{"target", {{"path", options.target.string()},
                              {"sha256", target.sha256},
                              {"id", RecordId(target, record)}}},
                  {"retrieved", {{"path", options.retrieved.string()},
                                 {"sha256", retrieved.sha256},
                                 {"count", retrieved.file.count}}},
                  {"mask", options.mask.string()}}},
      {"output", {{"path", options.out.string()},
                  {"sha256", FileSha256(options.out)},
                  {"grid_h", out.grid_h},
                  {"grid_w", out.grid_w},
                  {"dim", out.dim},
                  {"foreground_cells", fg.count()},
                  {"background_cells", fg.size() - fg.count()}}}};
  return report;
}

// ---------------------------------------------------------------------------
// controls

Report Controls(const ControlsOptions& options) {
  const DatasetManifest manifest = ReadManifest(options.manifest);
  std::filesystem::create_directories(options.out_dir);

  struct ControlRow {
    std::string contrast_file;
    std::optional<Error> error;
  };
  std::vector<ControlRow> rows(manifest.entries.size());
  ParallelFor(rows.size(), options.workers, [&](std::size_t i) {
    const auto& e = manifest.entries[i];
    try {
      if (!IsPlainFileName(e.id)) {
        throw Error(ErrorCode::kInvalidArgument, "id is not usable as a file name");
      }
      const SampleRecord sample = LoadSample(e);
      const ControlImage contrast = ContrastControl(sample, options.mode, options.lambda);
      if (e.depth_path) ValidateControl(*e.depth_path, ControlKind::kDepth, sample);
      if (e.hed_path) ValidateControl(*e.hed_path, ControlKind::kHed, sample);
      rows[i].contrast_file = e.id + "_contrast.png";
      WriteImage(options.out_dir / rows[i].contrast_file, contrast.image);
    } catch (...) {
      rows[i].error = CurrentError();
    }
  });

  auto absolute = [](const std::filesystem::path& p) {
    return std::filesystem::absolute(p).lexically_normal().string();
  };
  Report report;
  report.command = "controls";
  json row_json = json::array();
  json failures = json::array();
  std::string emitted;
  Table& table = report.tables["rows"];
  table.columns = {"id", "subset", "status", "contrast_path", "depth", "hed",
                   "error_code", "error_message"};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& e = manifest.entries[i];
    const auto& r = rows[i];
    const char* depth = e.depth_path ? "valid" : "absent";
    const char* hed = e.hed_path ? "valid" : "absent";
    json j = {{"id", e.id}, {"subset", SubsetName(e.subset)}};
    if (r.error) {
      j["status"] = "failed";
      j["error"] = ErrorJson(*r.error);
      failures.push_back(FailureJson(e.id, *r.error));
      table.rows.push_back({e.id, std::string(SubsetName(e.subset)), "failed", "", "",
                            "", std::string(ErrorCodeName(r.error->code())),
                            r.error->what()});
    } else {
      j["status"] = "ok";
      j["contrast_path"] = r.contrast_file;
      j["depth"] = depth;
      j["hed"] = hed;
      table.rows.push_back({e.id, std::string(SubsetName(e.subset)), "ok",
                            r.contrast_file, depth, hed, "", ""});
      json line = {{"id", e.id},
                   {"subset", SubsetName(e.subset)},
                   {"image_path", absolute(e.image_path)},
                   {"mask_path", absolute(e.mask_path)},
                   {"contrast_path", r.contrast_file},
                   {"mode", RunModeName(options.mode)}};
      if (e.reference_path) line["reference_path"] = absolute(*e.reference_path);
      if (e.depth_path) line["depth_path"] = absolute(*e.depth_path);
      if (e.hed_path) line["hed_path"] = absolute(*e.hed_path);
      emitted += line.dump() + "\n";
    }
    row_json.push_back(j);
  }
  WriteTextFile(options.out_dir / kControlsManifestName, emitted);

  report.body = {
      {"config", {{"mode", RunModeName(options.mode)},
                  {"lambda", options.lambda},
                  {"training", "background channels pulled toward their mean: "
                               "round(mu + lambda * (v - mu))"},
                  {"inference", "background painted (255, 255, 255)"},
                  {"approximation", "stand-in contrast control, not the cited "
                                    "method's exact formulation"}}},
      {"inputs", {{"manifest", options.manifest.string()},
                  {"manifest_sha256", FileSha256(options.manifest)}}},
      {"output", {{"dir", options.out_dir.string()},
                  {"manifest", kControlsManifestName}}},
      {"rows", row_json},
      {"failures", failures},
      {"failed_rows", failures.size()}};
  report.failed = failures.size();
  return report;
}

// ---------------------------------------------------------------------------
// validate

Report Validate(const std::filesystem::path& manifest_path, int workers) {
  const DatasetManifest manifest = ReadManifest(manifest_path);
  const ValidationReport v = ValidateManifest(manifest, workers);
  Report report;
  report.command = "validate";
  json counts = json::object();
  for (const auto& [subset, n] : v.subset_counts) counts[std::string(SubsetName(subset))] = n;
  json failures = json::array();
  Table& table = report.tables["failures"];
  table.columns = {"id", "reason"};
  for (const auto& f : v.failures) {
    failures.push_back({{"id", f.id}, {"reason", f.reason}});
    table.rows.push_back({f.id, f.reason});
  }
  report.body = {{"inputs", {{"manifest", manifest_path.string()},
                             {"manifest_sha256", FileSha256(manifest_path)},
                             {"entries", manifest.entries.size()}}},
                 {"valid_count", v.valid_count},
                 {"subset_counts", counts},
                 {"failures", failures}};
  report.failed = v.failures.size();
  return report;
}

}  // namespace camoval
