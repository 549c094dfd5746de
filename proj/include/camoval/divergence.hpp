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

// Background/foreground colour-distribution divergence.
//
// For every RGB channel the pixels inside the foreground and inside the
// background are histogrammed separately (only pixels of the region count),
// each histogram is smoothed by adding `epsilon` to every bin and normalized,
// and KL(background || foreground) is taken in nats. KL_BF is the mean of the
// three channel divergences; lower means the target blends in better.

#ifndef CAMOVAL_DIVERGENCE_HPP_
#define CAMOVAL_DIVERGENCE_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "camoval/corpus.hpp"

namespace camoval {

enum class Region { kForeground, kBackground };
enum class Channel { kR = 0, kG = 1, kB = 2 };

struct HistogramConfig {
  int bins = 256;          // 1..256; 8-bit level v lands in bin v*bins/256
  double epsilon = 1e-10;  // added to every bin before normalization
};

struct ChannelHistogram {
  std::vector<double> bins;  // probabilities, all > 0, sum 1
  std::size_t sample_count = 0;
};

struct KlbfResult {
  double kl_r = 0.0;
  double kl_g = 0.0;
  double kl_b = 0.0;
  double kl_bf = 0.0;
  std::size_t foreground_pixels = 0;
  std::size_t background_pixels = 0;
};

// Throws kEmptyRegion when the region selects no pixel and kDimensionMismatch
// when image and mask disagree.
ChannelHistogram RegionHistogram(const ImageBuffer& image, const RegionMask& mask,
                                 Region region, Channel channel,
                                 const HistogramConfig& config = {});

// sum_i p_i ln(p_i / q_i). Both histograms must share a support.
double KlDivergence(const ChannelHistogram& p, const ChannelHistogram& q);

KlbfResult Klbf(const ImageBuffer& image, const RegionMask& mask,
                const HistogramConfig& config = {});

struct SummaryStats {
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;  // population
};

struct KlbfAggregate {
  std::size_t count = 0;
  SummaryStats kl_r;
  SummaryStats kl_g;
  SummaryStats kl_b;
  SummaryStats kl_bf;
};

// Throws kEmptyList on an empty input.
SummaryStats Summarize(std::span<const double> values);
KlbfAggregate AggregateKlbf(std::span<const KlbfResult> results);

}  // namespace camoval

#endif  // CAMOVAL_DIVERGENCE_HPP_
