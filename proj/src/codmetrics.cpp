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

#include "camoval/codmetrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "camoval/error.hpp"

namespace camoval {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kThresholdSlack = 1e-12;

void CheckShape(const PredictionMap& pred, const RegionMask& gt) {
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "prediction " + std::to_string(pred.width()) + "x" +
                    std::to_string(pred.height()) + " vs ground truth " +
                    std::to_string(gt.width()) + "x" + std::to_string(gt.height()));
  }
  if (!pred.values.allFinite() || (pred.values < 0.0).any() || (pred.values > 1.0).any()) {
    throw Error(ErrorCode::kInvalidArgument, "prediction values must lie in [0, 1]");
  }
}

void CheckNonEmpty(const RegionMask& gt) {
  if (gt.foreground_count() == 0) {
    throw Error(ErrorCode::kEmptyGroundTruth, "ground truth has no foreground");
  }
}

// ----- S-measure ----------------------------------------------------------

double ObjectSimilarity(const Eigen::ArrayXXd& x, const Eigen::ArrayXXd& region) {
  double sum = 0.0;
  double count = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (region(i) > 0.5) {
      sum += x(i);
      count += 1.0;
    }
  }
  const double mean = sum / count;
  double ss = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (region(i) > 0.5) ss += (x(i) - mean) * (x(i) - mean);
  }
  const double sd = count > 1.0 ? std::sqrt(ss / (count - 1.0)) : 0.0;
  return 2.0 * mean / (mean * mean + 1.0 + sd + kEps);
}

double ObjectScore(const Eigen::ArrayXXd& pred, const Eigen::ArrayXXd& gt) {
  const double u = gt.mean();
  const Eigen::ArrayXXd fg = pred * gt;
  const Eigen::ArrayXXd bg = (1.0 - pred) * (1.0 - gt);
  return u * ObjectSimilarity(fg, gt) + (1.0 - u) * ObjectSimilarity(bg, 1.0 - gt);
}

// Structural similarity of one quadrant; sample (N-1) moments.
double QuadrantSsim(const Eigen::ArrayXXd& pred, const Eigen::ArrayXXd& gt) {
  const double n = static_cast<double>(pred.size());
  if (n == 0) return 0.0;
  const double x = pred.mean();
  const double y = gt.mean();
  const double denom = n > 1 ? n - 1 : 1.0;
  const double sx = (pred - x).square().sum() / denom;
  const double sy = (gt - y).square().sum() / denom;
  const double sxy = ((pred - x) * (gt - y)).sum() / denom;
  const double alpha = 4.0 * x * y * sxy;
  const double beta = (x * x + y * y) * (sx + sy);
  if (alpha != 0.0) return alpha / (beta + kEps);
  if (beta == 0.0) return 1.0;
  return 0.0;
}

double RegionScore(const Eigen::ArrayXXd& pred, const Eigen::ArrayXXd& gt) {
  const Eigen::Index h = gt.rows();
  const Eigen::Index w = gt.cols();
  double sum_r = 0.0;
  double sum_c = 0.0;
  double count = 0.0;
  for (Eigen::Index c = 0; c < w; ++c) {
    for (Eigen::Index r = 0; r < h; ++r) {
      if (gt(r, c) > 0.5) {
        sum_r += static_cast<double>(r);
        sum_c += static_cast<double>(c);
        count += 1.0;
      }
    }
  }
  // Split after the centroid pixel: quadrant top-left spans rows [0, y).
  const auto x = static_cast<Eigen::Index>(std::round(sum_c / count)) + 1;
  const auto y = static_cast<Eigen::Index>(std::round(sum_r / count)) + 1;
  const double area = static_cast<double>(h * w);
  const double w1 = static_cast<double>(x * y) / area;
  const double w2 = static_cast<double>(y * (w - x)) / area;
  const double w3 = static_cast<double>((h - y) * x) / area;
  const double w4 = 1.0 - w1 - w2 - w3;
  auto quad = [&](Eigen::Index r0, Eigen::Index c0, Eigen::Index rows,
                  Eigen::Index cols) {
    if (rows <= 0 || cols <= 0) return 0.0;
    return QuadrantSsim(pred.block(r0, c0, rows, cols), gt.block(r0, c0, rows, cols));
  };
  return w1 * quad(0, 0, y, x) + w2 * quad(0, x, y, w - x) +
         w3 * quad(y, 0, h - y, x) + w4 * quad(y, x, h - y, w - x);
}

// Enhanced alignment from the confusion counts of a binary map: tp/fp are
// predicted-foreground pixels on gt foreground/background, g the gt
// foreground size, n the pixel count. Pixels sharing a (binary, gt) pair share
// one alignment value, so four terms cover the whole map.
double AlignmentFromCounts(double tp, double fp, double g, double n) {
  const double predicted = tp + fp;
  if (g == 0.0) return (n - predicted) / n;
  if (g == n) return predicted / n;
  const double mean_fm = predicted / n;
  const double mean_gt = g / n;
  const std::array<double, 4> count = {tp, fp, g - tp, n - g - fp};
  const std::array<double, 4> a = {1.0 - mean_fm, 1.0 - mean_fm, -mean_fm, -mean_fm};
  const std::array<double, 4> b = {1.0 - mean_gt, -mean_gt, 1.0 - mean_gt, -mean_gt};
  double total = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    if (count[k] == 0.0) continue;
    const double align = 2.0 * a[k] * b[k] / (a[k] * a[k] + b[k] * b[k] + kEps);
    total += count[k] * (align + 1.0) * (align + 1.0) / 4.0;
  }
  return total / n;
}

// ----- Weighted F ---------------------------------------------------------

// 7x7 Gaussian, sigma 5, normalized to unit sum.
std::array<std::array<double, 7>, 7> DependencyKernel() {
  std::array<std::array<double, 7>, 7> k{};
  double sum = 0.0;
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 7; ++j) {
      const double dy = i - 3;
      const double dx = j - 3;
      k[i][j] = std::exp(-(dx * dx + dy * dy) / (2.0 * 5.0 * 5.0));
      sum += k[i][j];
    }
  }
  for (auto& row : k) {
    for (double& v : row) v /= sum;
  }
  return k;
}

// Exact rational r = num / den with den > 0, or +-infinity.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  int inf = 0;  // -1, 0, +1

  bool operator<=(const Rational& o) const {
    if (inf < 0 || o.inf > 0) return true;
    if (inf > 0 || o.inf < 0) return false;
    return num * o.den <= o.num * den;
  }
  bool LessThan(std::int64_t v) const {
    if (inf != 0) return inf < 0;
    return num < v * den;
  }
};

}  // namespace

PredictionMap PredictionMap::FromGray(const GrayRaster& gray) {
  PredictionMap p;
  p.values.resize(gray.height, gray.width);
  for (int r = 0; r < gray.height; ++r) {
    for (int c = 0; c < gray.width; ++c) {
      p.values(r, c) =
          gray.values[static_cast<std::size_t>(r) * static_cast<std::size_t>(gray.width) +
                      static_cast<std::size_t>(c)] /
          255.0;
    }
  }
  return p;
}

PredictionMap PredictionMap::FromMask(const RegionMask& mask) {
  return PredictionMap{MaskToArray(mask)};
}

Eigen::ArrayXXd MaskToArray(const RegionMask& mask) {
  Eigen::ArrayXXd a(mask.height(), mask.width());
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) a(r, c) = mask.at(c, r) ? 1.0 : 0.0;
  }
  return a;
}

double Mae(const PredictionMap& pred, const RegionMask& gt) {
  CheckShape(pred, gt);
  return (pred.values - MaskToArray(gt)).abs().mean();
}

double FMeasure(const PredictionMap& pred, const RegionMask& gt) {
  CheckShape(pred, gt);
  CheckNonEmpty(gt);
  const double threshold = std::min(1.0, 2.0 * pred.values.mean());
  // 8-bit maps hit the threshold exactly; keep such ties on the foreground
  // side regardless of summation order.
  const double cut = threshold - kThresholdSlack;
  double tp = 0.0;
  double predicted = 0.0;
  for (int r = 0; r < pred.height(); ++r) {
    for (int c = 0; c < pred.width(); ++c) {
      const double v = pred.values(r, c);
      // Zero-valued pixels never count as foreground, so an all-zero map
      // scores 0 instead of predicting the whole frame.
      if (v > 0.0 && v >= cut) {
        predicted += 1.0;
        if (gt.at(c, r)) tp += 1.0;
      }
    }
  }
  if (tp == 0.0) return 0.0;
  const double precision = tp / predicted;
  const double recall = tp / static_cast<double>(gt.foreground_count());
  return (1.0 + kFBetaSquared) * precision * recall /
         (kFBetaSquared * precision + recall);
}

double SMeasure(const PredictionMap& pred, const RegionMask& gt) {
  CheckShape(pred, gt);
  const Eigen::ArrayXXd g = MaskToArray(gt);
  if (gt.foreground_count() == 0) return 1.0 - pred.values.mean();
  if (gt.background_count() == 0) return pred.values.mean();
  const double score = kSMeasureAlpha * ObjectScore(pred.values, g) +
                       (1.0 - kSMeasureAlpha) * RegionScore(pred.values, g);
  return std::clamp(score, 0.0, 1.0);
}

double EnhancedAlignment(const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& binary,
                         const RegionMask& gt) {
  if (binary.rows() != gt.height() || binary.cols() != gt.width()) {
    throw Error(ErrorCode::kDimensionMismatch, "binary map and ground truth differ");
  }
  double tp = 0.0;
  double fp = 0.0;
  for (int r = 0; r < gt.height(); ++r) {
    for (int c = 0; c < gt.width(); ++c) {
      if (!binary(r, c)) continue;
      if (gt.at(c, r)) {
        tp += 1.0;
      } else {
        fp += 1.0;
      }
    }
  }
  return AlignmentFromCounts(tp, fp, static_cast<double>(gt.foreground_count()),
                             static_cast<double>(gt.pixel_count()));
}

double EMeasure(const PredictionMap& pred, const RegionMask& gt) {
  CheckShape(pred, gt);
  // Threshold t_i = i / 255; a pixel is foreground at t_i iff value >= t_i.
  // levels(pixel) = number of thresholds it passes.
  const int n_thr = kEMeasureThresholds;
  std::vector<double> fg_fg(n_thr + 1, 0.0);
  std::vector<double> fg_bg(n_thr + 1, 0.0);
  for (int r = 0; r < pred.height(); ++r) {
    for (int c = 0; c < pred.width(); ++c) {
      const double v = pred.values(r, c);
      int top = std::clamp(static_cast<int>(std::floor(v * 255.0)), 0, n_thr - 1);
      while (top + 1 < n_thr && (top + 1) / 255.0 <= v) ++top;
      while (top >= 0 && top / 255.0 > v) --top;
      // Passes thresholds 0..top.
      auto& hist = gt.at(c, r) ? fg_fg : fg_bg;
      hist[static_cast<std::size_t>(top + 1)] += 1.0;
    }
  }
  // Suffix sums: passing[i] = #pixels with top >= i.
  const double n = static_cast<double>(gt.pixel_count());
  const double g = static_cast<double>(gt.foreground_count());
  double pass_fg = 0.0;
  double pass_bg = 0.0;
  std::vector<double> at_fg(n_thr), at_bg(n_thr);
  for (int i = n_thr - 1; i >= 0; --i) {
    pass_fg += fg_fg[static_cast<std::size_t>(i + 1)];
    pass_bg += fg_bg[static_cast<std::size_t>(i + 1)];
    at_fg[static_cast<std::size_t>(i)] = pass_fg;
    at_bg[static_cast<std::size_t>(i)] = pass_bg;
  }

  double sum = 0.0;
  for (int i = 0; i < n_thr; ++i) {
    sum += AlignmentFromCounts(at_fg[static_cast<std::size_t>(i)],
                               at_bg[static_cast<std::size_t>(i)], g, n);
  }
  return sum / n_thr;
}

FeatureTransform NearestForeground(const RegionMask& mask) {
  CheckNonEmpty(mask);
  const int h = mask.height();
  const int w = mask.width();
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();

  // Column pass: nearest foreground row within the same column (upper wins).
  Eigen::Array<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> g(h, w);
  Eigen::ArrayXXi row_of(h, w);
  std::vector<bool> column_has_fg(static_cast<std::size_t>(w), false);
  for (int c = 0; c < w; ++c) {
    int above = -1;
    for (int r = 0; r < h; ++r) {
      if (mask.at(c, r)) above = r;
      row_of(r, c) = above;
    }
    int below = -1;
    for (int r = h - 1; r >= 0; --r) {
      if (mask.at(c, r)) below = r;
      const int up = row_of(r, c);
      if (up < 0 && below < 0) {
        g(r, c) = kInf;
        continue;
      }
      column_has_fg[static_cast<std::size_t>(c)] = true;
      int best = up;
      if (best < 0 || (below >= 0 && below - r < r - up)) best = below;
      row_of(r, c) = best;
      g(r, c) = static_cast<std::int64_t>(r - best) * (r - best);
    }
  }

  FeatureTransform out{Eigen::ArrayXXd(h, w), Eigen::ArrayXXi(h, w),
                       Eigen::ArrayXXi(h, w)};
  std::vector<int> valid;
  for (int c = 0; c < w; ++c) {
    if (column_has_fg[static_cast<std::size_t>(c)]) valid.push_back(c);
  }

  // Row pass: lower envelope of parabolas (c - q)^2 + g(r, q) over columns q
  // that contain foreground. Breakpoints are exact rationals so ties resolve
  // to the smaller column deterministically.
  std::vector<int> v(valid.size());
  std::vector<Rational> z(valid.size() + 1);
  for (int r = 0; r < h; ++r) {
    auto f = [&](int q) { return g(r, q); };
    std::size_t k = 0;
    v[0] = valid[0];
    z[0] = Rational{0, 1, -1};
    z[1] = Rational{0, 1, 1};
    for (std::size_t idx = 1; idx < valid.size(); ++idx) {
      const int q = valid[idx];
      Rational s;
      for (;;) {
        const int p = v[k];
        s = Rational{(f(q) + static_cast<std::int64_t>(q) * q) -
                         (f(p) + static_cast<std::int64_t>(p) * p),
                     2 * static_cast<std::int64_t>(q - p), 0};
        if (k > 0 && s <= z[k]) {
          --k;
          continue;
        }
        break;
      }
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = Rational{0, 1, 1};
    }
    std::size_t j = 0;
    for (int c = 0; c < w; ++c) {
      while (z[j + 1].LessThan(c)) ++j;
      const int q = v[j];
      const std::int64_t dc = c - q;
      out.squared_distance(r, c) = static_cast<double>(dc * dc + g(r, q));
      out.nearest_col(r, c) = q;
      out.nearest_row(r, c) = row_of(r, q);
    }
  }
  return out;
}

double WeightedFMeasure(const PredictionMap& pred, const RegionMask& gt) {
  CheckShape(pred, gt);
  CheckNonEmpty(gt);
  const int h = gt.height();
  const int w = gt.width();
  const Eigen::ArrayXXd g = MaskToArray(gt);
  const Eigen::ArrayXXd error = (pred.values - g).abs();
  const FeatureTransform ft = NearestForeground(gt);

  // Background pixels inherit the error of their nearest foreground pixel.
  Eigen::ArrayXXd spread = error;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!gt.at(c, r)) spread(r, c) = error(ft.nearest_row(r, c), ft.nearest_col(r, c));
    }
  }

  const auto kernel = DependencyKernel();
  Eigen::ArrayXXd blurred = Eigen::ArrayXXd::Zero(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int i = 0; i < 7; ++i) {
        const int rr = r + i - 3;
        if (rr < 0 || rr >= h) continue;
        for (int j = 0; j < 7; ++j) {
          const int cc = c + j - 3;
          if (cc < 0 || cc >= w) continue;
          acc += kernel[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                 spread(rr, cc);
        }
      }
      blurred(r, c) = acc;
    }
  }

  const double decay = std::log(0.5) / 5.0;
  double fg_weighted_error = 0.0;
  double bg_weighted_error = 0.0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (gt.at(c, r)) {
        const double e = blurred(r, c) < error(r, c) ? blurred(r, c) : error(r, c);
        fg_weighted_error += e;
      } else {
        const double importance =
            2.0 - std::exp(decay * std::sqrt(ft.squared_distance(r, c)));
        bg_weighted_error += error(r, c) * importance;
      }
    }
  }
  const double fg = static_cast<double>(gt.foreground_count());
  const double tp = fg - fg_weighted_error;
  const double recall = 1.0 - fg_weighted_error / fg;
  const double precision = tp / (tp + bg_weighted_error + kEps);
  const double score = (1.0 + kWeightedFBetaSquared) * recall * precision /
                       (recall + kWeightedFBetaSquared * precision + kEps);
  return std::clamp(score, 0.0, 1.0);
}

CodScores ScoreCod(const PredictionMap& pred, const RegionMask& gt) {
  CodScores s;
  s.mae = Mae(pred, gt);
  s.s_alpha = SMeasure(pred, gt);
  s.e_phi = EMeasure(pred, gt);
  s.f_beta = FMeasure(pred, gt);
  s.f_beta_w = WeightedFMeasure(pred, gt);
  return s;
}

CodScores MeanScores(std::span<const CodScores> scores) {
  if (scores.empty()) {
    throw Error(ErrorCode::kEmptyList, "no COD scores to average");
  }
  CodScores m;
  for (const auto& s : scores) {
    m.mae += s.mae;
    m.s_alpha += s.s_alpha;
    m.e_phi += s.e_phi;
    m.f_beta += s.f_beta;
    m.f_beta_w += s.f_beta_w;
  }
  const double n = static_cast<double>(scores.size());
  m.mae /= n;
  m.s_alpha /= n;
  m.e_phi /= n;
  m.f_beta /= n;
  m.f_beta_w /= n;
  return m;
}

CodScores CodEvaluate(std::span<const CodPair> pairs) {
  if (pairs.empty()) {
    throw Error(ErrorCode::kEmptyList, "no prediction/ground-truth pairs");
  }
  std::vector<CodScores> scores;
  scores.reserve(pairs.size());
  for (const auto& p : pairs) scores.push_back(ScoreCod(p.pred, p.gt));
  return MeanScores(scores);
}

}  // namespace camoval
