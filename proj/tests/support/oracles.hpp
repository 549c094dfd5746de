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

// Reference implementations used only by tests. Each follows the textbook
// definition with direct loops (long double where it matters) and shares no
// code with the library beyond its data types.

#ifndef CAMOVAL_TESTS_ORACLES_HPP_
#define CAMOVAL_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "camoval/corpus.hpp"

namespace camoval::oracle {

using Real = long double;

// ----- KL_BF ------------------------------------------------------------

struct Klbf4 {
  double r, g, b, mean;
};

inline Klbf4 Klbf(const ImageBuffer& img, const RegionMask& mask, int bins = 256,
                  double eps = 1e-10) {
  double kl[3];
  for (int c = 0; c < 3; ++c) {
    std::vector<Real> fg(static_cast<std::size_t>(bins), 0), bg(static_cast<std::size_t>(bins), 0);
    Real nf = 0, nb = 0;
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        const int bin = img.at(x, y, c) * bins / 256;
        if (mask.at(x, y)) {
          fg[static_cast<std::size_t>(bin)] += 1;
          nf += 1;
        } else {
          bg[static_cast<std::size_t>(bin)] += 1;
          nb += 1;
        }
      }
    }
    Real sum = 0;
    for (int i = 0; i < bins; ++i) {
      const Real p = (bg[static_cast<std::size_t>(i)] + eps) / (nb + bins * Real(eps));
      const Real q = (fg[static_cast<std::size_t>(i)] + eps) / (nf + bins * Real(eps));
      sum += p * std::log(p / q);
    }
    kl[c] = static_cast<double>(sum);
  }
  return {kl[0], kl[1], kl[2], (kl[0] + kl[1] + kl[2]) / 3.0};
}

// ----- SSIM -------------------------------------------------------------

inline double Ssim(const ImageBuffer& a, const ImageBuffer& b, int win = 11,
                   double sigma = 1.5, double k1 = 0.01, double k2 = 0.03,
                   double range = 255.0) {
  const int h = a.height();
  const int w = a.width();
  auto luma = [](const ImageBuffer& im, int x, int y) {
    return Real(0.299) * im.at(x, y, 0) + Real(0.587) * im.at(x, y, 1) +
           Real(0.114) * im.at(x, y, 2);
  };
  std::vector<Real> kern(static_cast<std::size_t>(win * win));
  Real ksum = 0;
  const Real center = (win - 1) / Real(2);
  for (int u = 0; u < win; ++u) {
    for (int v = 0; v < win; ++v) {
      const Real d2 = (u - center) * (u - center) + (v - center) * (v - center);
      kern[static_cast<std::size_t>(u * win + v)] = std::exp(-d2 / (2 * Real(sigma) * sigma));
      ksum += kern[static_cast<std::size_t>(u * win + v)];
    }
  }
  for (auto& k : kern) k /= ksum;
  const Real c1 = (Real(k1) * range) * (Real(k1) * range);
  const Real c2 = (Real(k2) * range) * (Real(k2) * range);
  Real total = 0;
  int windows = 0;
  for (int y0 = 0; y0 + win <= h; ++y0) {
    for (int x0 = 0; x0 + win <= w; ++x0) {
      Real ma = 0, mb = 0;
      for (int u = 0; u < win; ++u) {
        for (int v = 0; v < win; ++v) {
          const Real k = kern[static_cast<std::size_t>(u * win + v)];
          ma += k * luma(a, x0 + v, y0 + u);
          mb += k * luma(b, x0 + v, y0 + u);
        }
      }
      Real va = 0, vb = 0, cov = 0;
      for (int u = 0; u < win; ++u) {
        for (int v = 0; v < win; ++v) {
          const Real k = kern[static_cast<std::size_t>(u * win + v)];
          const Real da = luma(a, x0 + v, y0 + u) - ma;
          const Real db = luma(b, x0 + v, y0 + u) - mb;
          va += k * da * da;
          vb += k * db * db;
          cov += k * da * db;
        }
      }
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) /
               ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++windows;
    }
  }
  return static_cast<double>(total / windows);
}

// ----- Feature statistics ------------------------------------------------

using MatL = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VecL = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

inline void MeanCov(const Eigen::MatrixXd& x, VecL& mean, MatL& cov) {
  const auto n = x.rows();
  const auto d = x.cols();
  mean = VecL::Zero(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) mean(j) += x(i, j);
  }
  mean /= Real(n);
  cov = MatL::Zero(d, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index p = 0; p < d; ++p) {
      for (Eigen::Index q = 0; q < d; ++q) {
        cov(p, q) += (x(i, p) - mean(p)) * (x(i, q) - mean(q));
      }
    }
  }
  cov /= Real(n - 1);
}

// tr sqrt(A B) as the sum of square roots of the eigenvalues of the
// (non-symmetric) product, found with the general eigensolver.
inline Real TraceSqrtProduct(const MatL& a, const MatL& b) {
  Eigen::EigenSolver<MatL> es(a * b, false);
  Real tr = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    tr += std::sqrt(std::max(Real(0), es.eigenvalues()(i).real()));
  }
  return tr;
}

inline double Frechet(const VecL& m1, const MatL& c1, const VecL& m2, const MatL& c2) {
  const Real diff = (m1 - m2).squaredNorm();
  return static_cast<double>(diff + c1.trace() + c2.trace() - 2 * TraceSqrtProduct(c1, c2));
}

inline double FrechetFromFeatures(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  VecL m1, m2;
  MatL c1, c2;
  MeanCov(x, m1, c1);
  MeanCov(y, m2, c2);
  return Frechet(m1, c1, m2, c2);
}

// Unbiased MMD^2 with an explicit double loop over every pair.
inline double Mmd2(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int degree,
                   double gamma, double coef0) {
  auto k = [&](const Eigen::MatrixXd& a, Eigen::Index i, const Eigen::MatrixXd& b,
               Eigen::Index j) {
    Real dot = 0;
    for (Eigen::Index t = 0; t < a.cols(); ++t) dot += Real(a(i, t)) * b(j, t);
    Real base = gamma * dot + coef0;
    Real out = 1;
    for (int p = 0; p < degree; ++p) out *= base;
    return out;
  };
  const Eigen::Index m = x.rows();
  const Eigen::Index n = y.rows();
  Real xx = 0, yy = 0, xy = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i != j) xx += k(x, i, x, j);
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) yy += k(y, i, y, j);
    }
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) xy += k(x, i, y, j);
  }
  return static_cast<double>(xx / (m * (m - 1)) + yy / (n * (n - 1)) - 2 * xy / (m * n));
}

// Linear kernel (degree 1, coef0 0) through mean embeddings:
// MMD^2 = gamma * (|Sx|^2 - sum|x|^2)/(m(m-1)) + ... - 2 gamma mx.my
inline double Mmd2Linear(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double gamma) {
  const Real m = Real(x.rows());
  const Real n = Real(y.rows());
  const VecL sx = x.colwise().sum().transpose().cast<Real>();
  const VecL sy = y.colwise().sum().transpose().cast<Real>();
  const Real nx = x.cast<Real>().squaredNorm();
  const Real ny = y.cast<Real>().squaredNorm();
  const Real within_x = (sx.squaredNorm() - nx) / (m * (m - 1));
  const Real within_y = (sy.squaredNorm() - ny) / (n * (n - 1));
  const Real cross = sx.dot(sy) / (m * n);
  return static_cast<double>(gamma * (within_x + within_y - 2 * cross));
}

// ----- Retrieval ----------------------------------------------------------

inline double Cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Real dot = 0, na = 0, nb = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    dot += Real(a(i)) * b(i);
    na += Real(a(i)) * a(i);
    nb += Real(b(i)) * b(i);
  }
  return static_cast<double>(dot / (std::sqrt(na) * std::sqrt(nb)));
}

// Literal top-k loop: k times, take the best remaining candidate and remove it.
inline std::vector<std::string> ArgmaxRemove(const Eigen::VectorXd& target,
                                             std::vector<std::string> ids,
                                             std::vector<Eigen::VectorXd> base,
                                             std::size_t k) {
  std::vector<std::string> picked;
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t best = 0;
    double best_score = -2.0;
    for (std::size_t i = 0; i < base.size(); ++i) {
      const double s = Cosine(target, base[i]);
      if (s > best_score) {
        best_score = s;
        best = i;
      }
    }
    picked.push_back(ids[best]);
    ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(best));
    base.erase(base.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return picked;
}

// Foreground fraction of grid cell (i, j), integrating each pixel's square
// against the cell rectangle.
inline double CellCoverage(const RegionMask& m, int gh, int gw, int i, int j) {
  const Real y0 = Real(i) * m.height() / gh, y1 = Real(i + 1) * m.height() / gh;
  const Real x0 = Real(j) * m.width() / gw, x1 = Real(j + 1) * m.width() / gw;
  Real covered = 0;
  for (int y = 0; y < m.height(); ++y) {
    const Real oy = std::max(Real(0), std::min<Real>(y + 1, y1) - std::max<Real>(y, y0));
    if (oy == 0) continue;
    for (int x = 0; x < m.width(); ++x) {
      if (!m.at(x, y)) continue;
      covered += oy * std::max(Real(0), std::min<Real>(x + 1, x1) - std::max<Real>(x, x0));
    }
  }
  return static_cast<double>(covered / ((y1 - y0) * (x1 - x0)));
}

// ----- COD metrics --------------------------------------------------------

constexpr double kEps = std::numeric_limits<double>::epsilon();

inline double Mae(const Eigen::ArrayXXd& p, const RegionMask& gt) {
  Real s = 0;
  for (int r = 0; r < gt.height(); ++r) {
    for (int c = 0; c < gt.width(); ++c) s += std::fabs(p(r, c) - (gt.at(c, r) ? 1.0 : 0.0));
  }
  return static_cast<double>(s / (gt.width() * gt.height()));
}

inline double FMeasure(const Eigen::ArrayXXd& p, const RegionMask& gt, double beta2 = 0.3) {
  // Exact integer comparison when every value is an 8-bit level k/255.
  bool levels = true;
  long level_sum = 0;
  Real mean = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    mean += p(i);
    const double k = std::round(p(i) * 255);
    levels = levels && k / 255 == p(i);
    level_sum += static_cast<long>(k);
  }
  mean /= p.size();
  const double t = std::min(1.0, static_cast<double>(2 * mean));
  auto above = [&](double v) {
    if (!levels) return v >= t;
    const long k = std::lround(v * 255);
    return k == 255 || k * p.size() >= 2 * level_sum;
  };
  double tp = 0, fp = 0, fn = 0;
  for (int r = 0; r < gt.height(); ++r) {
    for (int c = 0; c < gt.width(); ++c) {
      const bool on = above(p(r, c)) && p(r, c) > 0;
      if (on && gt.at(c, r)) tp += 1;
      if (on && !gt.at(c, r)) fp += 1;
      if (!on && gt.at(c, r)) fn += 1;
    }
  }
  if (tp == 0) return 0.0;
  const double prec = tp / (tp + fp);
  const double rec = tp / (tp + fn);
  return (1 + beta2) * prec * rec / (beta2 * prec + rec);
}

inline double EMeasure(const Eigen::ArrayXXd& p, const RegionMask& gt) {
  const int h = gt.height(), w = gt.width();
  const double n = double(h) * w;
  double gsum = 0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) gsum += gt.at(c, r) ? 1 : 0;
  }
  Real total = 0;
  for (int i = 0; i < 256; ++i) {
    const double t = i / 255.0;
    Eigen::ArrayXXd fm(h, w);
    double fsum = 0;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        fm(r, c) = p(r, c) >= t ? 1.0 : 0.0;
        fsum += fm(r, c);
      }
    }
    Real score = 0;
    if (gsum == 0) {
      score = (n - fsum) / n;
    } else if (gsum == n) {
      score = fsum / n;
    } else {
      const double mf = fsum / n, mg = gsum / n;
      for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
          const double a = fm(r, c) - mf;
          const double b = (gt.at(c, r) ? 1.0 : 0.0) - mg;
          const double align = 2 * a * b / (a * a + b * b + kEps);
          score += (align + 1) * (align + 1) / 4;
        }
      }
      score /= n;
    }
    total += score;
  }
  return static_cast<double>(total / 256);
}

inline double SMeasure(const Eigen::ArrayXXd& p, const RegionMask& gt, double alpha = 0.5) {
  const int h = gt.height(), w = gt.width();
  auto g = [&](int r, int c) { return gt.at(c, r) ? 1.0 : 0.0; };
  double gmean = 0, pmean = 0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      gmean += g(r, c);
      pmean += p(r, c);
    }
  }
  gmean /= h * w;
  pmean /= h * w;
  if (gmean == 0) return 1 - pmean;
  if (gmean == 1) return pmean;

  // Object term.
  auto object = [&](bool fg) {
    std::vector<double> v;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        if (gt.at(c, r) == fg) v.push_back(fg ? p(r, c) : 1 - p(r, c));
      }
    }
    Real m = 0;
    for (double x : v) m += x;
    m /= v.size();
    Real ss = 0;
    for (double x : v) ss += (x - m) * (x - m);
    const Real sd = v.size() > 1 ? std::sqrt(ss / (v.size() - 1)) : 0;
    return static_cast<double>(2 * m / (m * m + 1 + sd + kEps));
  };
  const double so = gmean * object(true) + (1 - gmean) * object(false);

  // Region term.
  double sr = 0, sc = 0, cnt = 0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (gt.at(c, r)) {
        sr += r;
        sc += c;
        cnt += 1;
      }
    }
  }
  const int X = static_cast<int>(std::floor(sc / cnt + 0.5)) + 1;
  const int Y = static_cast<int>(std::floor(sr / cnt + 0.5)) + 1;
  auto ssim = [&](int r0, int r1, int c0, int c1) -> double {
    const int n = (r1 - r0) * (c1 - c0);
    if (r1 <= r0 || c1 <= c0) return 0.0;
    Real mx = 0, my = 0;
    for (int r = r0; r < r1; ++r) {
      for (int c = c0; c < c1; ++c) {
        mx += p(r, c);
        my += g(r, c);
      }
    }
    mx /= n;
    my /= n;
    Real vx = 0, vy = 0, cxy = 0;
    for (int r = r0; r < r1; ++r) {
      for (int c = c0; c < c1; ++c) {
        vx += (p(r, c) - mx) * (p(r, c) - mx);
        vy += (g(r, c) - my) * (g(r, c) - my);
        cxy += (p(r, c) - mx) * (g(r, c) - my);
      }
    }
    const Real d = n > 1 ? n - 1 : 1;
    vx /= d;
    vy /= d;
    cxy /= d;
    const Real a = 4 * mx * my * cxy;
    const Real b = (mx * mx + my * my) * (vx + vy);
    if (a != 0) return static_cast<double>(a / (b + kEps));
    return b == 0 ? 1.0 : 0.0;
  };
  const double area = double(h) * w;
  const double w1 = double(X) * Y / area;
  const double w2 = double(w - X) * Y / area;
  const double w3 = double(X) * (h - Y) / area;
  const double w4 = double(w - X) * (h - Y) / area;
  const double sreg = w1 * ssim(0, Y, 0, X) + w2 * ssim(0, Y, X, w) +
                      w3 * ssim(Y, h, 0, X) + w4 * ssim(Y, h, X, w);
  return std::clamp(alpha * so + (1 - alpha) * sreg, 0.0, 1.0);
}

// Nearest foreground pixel by exhaustive search; ties: smaller column, then
// smaller row.
struct Nearest {
  long d2;
  int row, col;
};

inline Nearest NearestFg(const RegionMask& m, int r, int c) {
  Nearest best{std::numeric_limits<long>::max(), -1, -1};
  for (int q = 0; q < m.width(); ++q) {
    for (int p = 0; p < m.height(); ++p) {
      if (!m.at(q, p)) continue;
      const long d2 = long(p - r) * (p - r) + long(q - c) * (q - c);
      if (d2 < best.d2) best = {d2, p, q};
    }
  }
  return best;
}

inline double WeightedF(const Eigen::ArrayXXd& p, const RegionMask& gt, double beta2 = 1.0) {
  const int h = gt.height(), w = gt.width();
  Eigen::ArrayXXd e(h, w), spread(h, w), dist(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) e(r, c) = std::fabs(p(r, c) - (gt.at(c, r) ? 1.0 : 0.0));
  }
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const Nearest nf = NearestFg(gt, r, c);
      dist(r, c) = std::sqrt(double(nf.d2));
      spread(r, c) = gt.at(c, r) ? e(r, c) : e(nf.row, nf.col);
    }
  }
  Real kern[7][7];
  Real ks = 0;
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 7; ++j) {
      kern[i][j] = std::exp(-Real((i - 3) * (i - 3) + (j - 3) * (j - 3)) / 50);
      ks += kern[i][j];
    }
  }
  Real fg_err = 0, bg_err = 0, fg_n = 0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (gt.at(c, r)) {
        Real blur = 0;
        for (int i = -3; i <= 3; ++i) {
          for (int j = -3; j <= 3; ++j) {
            const int rr = r + i, cc = c + j;
            if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
            blur += kern[i + 3][j + 3] / ks * spread(rr, cc);
          }
        }
        fg_err += std::min<Real>(blur, e(r, c));
        fg_n += 1;
      } else {
        bg_err += e(r, c) * (2 - std::exp(std::log(Real(0.5)) / 5 * dist(r, c)));
      }
    }
  }
  const Real tp = fg_n - fg_err;
  const Real rec = 1 - fg_err / fg_n;
  const Real prec = tp / (tp + bg_err + kEps);
  const Real q = (1 + beta2) * rec * prec / (rec + beta2 * prec + kEps);
  return std::clamp(static_cast<double>(q), 0.0, 1.0);
}

}  // namespace camoval::oracle

#endif  // CAMOVAL_TESTS_ORACLES_HPP_
