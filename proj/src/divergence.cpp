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

#include "camoval/divergence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "camoval/error.hpp"

namespace camoval {

namespace {

void CheckPair(const ImageBuffer& image, const RegionMask& mask) {
  if (image.width() != mask.width() || image.height() != mask.height()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "mask " + std::to_string(mask.width()) + "x" +
                    std::to_string(mask.height()) + " vs image " +
                    std::to_string(image.width()) + "x" +
                    std::to_string(image.height()));
  }
}

void CheckConfig(const HistogramConfig& config) {
  if (config.bins < 1 || config.bins > 256) {
    throw Error(ErrorCode::kInvalidArgument, "histogram bins must be in 1..256");
  }
  if (!(config.epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "histogram epsilon must be > 0");
  }
}

ChannelHistogram Normalize(std::span<const std::size_t> counts, std::size_t n,
                           double epsilon) {
  ChannelHistogram h;
  h.sample_count = n;
  h.bins.resize(counts.size());
  const double total =
      static_cast<double>(n) + epsilon * static_cast<double>(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    h.bins[i] = (static_cast<double>(counts[i]) + epsilon) / total;
  }
  return h;
}

}  // namespace

ChannelHistogram RegionHistogram(const ImageBuffer& image, const RegionMask& mask,
                                 Region region, Channel channel,
                                 const HistogramConfig& config) {
  CheckPair(image, mask);
  CheckConfig(config);
  const std::size_t selected = region == Region::kForeground
                                   ? mask.foreground_count()
                                   : mask.background_count();
  if (selected == 0) {
    throw Error(ErrorCode::kEmptyRegion,
                region == Region::kForeground ? "foreground region is empty"
                                              : "background region is empty");
  }
  const std::uint8_t want = region == Region::kForeground ? 1 : 0;
  const auto c = static_cast<std::size_t>(channel);
  const auto pixels = image.data();
  const auto bits = mask.bits();
  std::vector<std::size_t> counts(static_cast<std::size_t>(config.bins), 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != want) continue;
    const unsigned v = pixels[i * 3 + c];
    ++counts[v * static_cast<unsigned>(config.bins) / 256u];
  }
  return Normalize(counts, selected, config.epsilon);
}

double KlDivergence(const ChannelHistogram& p, const ChannelHistogram& q) {
  if (p.bins.size() != q.bins.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "histogram supports differ");
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < p.bins.size(); ++i) {
    kl += p.bins[i] * std::log(p.bins[i] / q.bins[i]);
  }
  return kl;
}

KlbfResult Klbf(const ImageBuffer& image, const RegionMask& mask,
                const HistogramConfig& config) {
  CheckPair(image, mask);
  CheckConfig(config);
  if (mask.foreground_count() == 0) {
    throw Error(ErrorCode::kEmptyRegion, "mask has no foreground pixels");
  }
  if (mask.background_count() == 0) {
    throw Error(ErrorCode::kEmptyRegion, "mask has no background pixels");
  }

  // One pass fills all six histograms.
  const auto bins = static_cast<std::size_t>(config.bins);
  std::array<std::vector<std::size_t>, 3> fg;
  std::array<std::vector<std::size_t>, 3> bg;
  for (auto& h : fg) h.assign(bins, 0);
  for (auto& h : bg) h.assign(bins, 0);
  const auto pixels = image.data();
  const auto bits = mask.bits();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    auto& target = bits[i] ? fg : bg;
    for (std::size_t c = 0; c < 3; ++c) {
      ++target[c][pixels[i * 3 + c] * bins / 256u];
    }
  }

  std::array<double, 3> kl{};
  for (std::size_t c = 0; c < 3; ++c) {
    const auto p = Normalize(bg[c], mask.background_count(), config.epsilon);
    const auto q = Normalize(fg[c], mask.foreground_count(), config.epsilon);
    kl[c] = KlDivergence(p, q);
  }

  KlbfResult r;
  r.kl_r = kl[0];
  r.kl_g = kl[1];
  r.kl_b = kl[2];
  r.kl_bf = (kl[0] + kl[1] + kl[2]) / 3.0;
  r.foreground_pixels = mask.foreground_count();
  r.background_pixels = mask.background_count();
  return r;
}

SummaryStats Summarize(std::span<const double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::kEmptyList, "cannot summarize an empty list");
  }
  const double n = static_cast<double>(values.size());
  SummaryStats s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / n);
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 == 1 ? sorted[mid]
                                    : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return s;
}

KlbfAggregate AggregateKlbf(std::span<const KlbfResult> results) {
  if (results.empty()) {
    throw Error(ErrorCode::kEmptyList, "no KL_BF results to aggregate");
  }
  std::vector<double> r, g, b, bf;
  for (const auto& x : results) {
    r.push_back(x.kl_r);
    g.push_back(x.kl_g);
    b.push_back(x.kl_b);
    bf.push_back(x.kl_bf);
  }
  KlbfAggregate agg;
  agg.count = results.size();
  agg.kl_r = Summarize(r);
  agg.kl_g = Summarize(g);
  agg.kl_b = Summarize(b);
  agg.kl_bf = Summarize(bf);
  return agg;
}

}  // namespace camoval
