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

// Distribution distances over externally extracted feature sets.
//
// Feature sets are N x D matrices, one sample per row. Everything here is a
// template on the scalar type so callers can run the same code in double for
// production and in long double for reference checks.

#ifndef CAMOVAL_FEATSTATS_HPP_
#define CAMOVAL_FEATSTATS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "camoval/error.hpp"

namespace camoval {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct GaussianStats {
  VectorX<Scalar> mean;
  MatrixX<Scalar> covariance;

  Eigen::Index dim() const { return mean.size(); }
};

// Sample mean and unbiased (N-1) covariance; the covariance is symmetrized.
template <typename Derived>
GaussianStats<typename Derived::Scalar> ComputeGaussianStats(
    const Eigen::MatrixBase<Derived>& features) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = features.rows();
  if (n < 2) {
    throw Error(ErrorCode::kTooFewSamples,
                "need at least 2 samples, got " + std::to_string(n));
  }
  if (!features.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "feature set has non-finite values");
  }
  GaussianStats<Scalar> stats;
  stats.mean = features.colwise().mean().transpose();
  const MatrixX<Scalar> centered = features.rowwise() - stats.mean.transpose();
  MatrixX<Scalar> cov = (centered.transpose() * centered) / Scalar(n - 1);
  stats.covariance = (cov + cov.transpose()) * Scalar(0.5);
  return stats;
}

template <typename Derived>
bool IsSymmetric(const Eigen::MatrixBase<Derived>& m,
                 typename Derived::Scalar rel_tol) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) return false;
  const Scalar scale = std::max(Scalar(1), m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

// Principal square root of a symmetric PSD matrix via eigendecomposition.
// Negative eigenvalues (round-off on near-singular inputs) are clamped to 0.
template <typename Derived>
MatrixX<typename Derived::Scalar> MatrixSqrtPsd(
    const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (!IsSymmetric(m, Scalar(1e-9))) {
    throw Error(ErrorCode::kNotSymmetric, "matrix square root needs a symmetric input");
  }
  const MatrixX<Scalar> sym = (m + m.transpose()) * Scalar(0.5);
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kInvalidArgument, "eigendecomposition failed");
  }
  const VectorX<Scalar> roots =
      solver.eigenvalues().cwiseMax(Scalar(0)).cwiseSqrt();
  const auto& v = solver.eigenvectors();
  return v * roots.asDiagonal() * v.transpose();
}

struct FrechetOptions {
  double jitter = 1e-6;
  double residual_tolerance = 1e-4;  // relative to max(1, max|M|)
};

namespace internal {

template <typename Scalar>
Scalar SqrtResidual(const MatrixX<Scalar>& root, const MatrixX<Scalar>& m) {
  const Scalar scale = std::max(Scalar(1), m.cwiseAbs().maxCoeff());
  return (root * root - m).cwiseAbs().maxCoeff() / scale;
}

// Tr sqrt(A B) for PSD A, B, evaluated through the similar symmetric matrix
// A^1/2 B A^1/2. Returns nullopt when a root fails its reconstruction check.
template <typename Scalar>
std::optional<Scalar> TraceSqrtProduct(const MatrixX<Scalar>& a,
                                       const MatrixX<Scalar>& b,
                                       Scalar tolerance) {
  const MatrixX<Scalar> root_a = MatrixSqrtPsd(a);
  MatrixX<Scalar> inner = root_a * b * root_a;
  inner = (inner + inner.transpose()) * Scalar(0.5);
  const MatrixX<Scalar> root_inner = MatrixSqrtPsd(inner);
  if (SqrtResidual(root_a, a) > tolerance ||
      SqrtResidual(root_inner, inner) > tolerance) {
    return std::nullopt;
  }
  return root_inner.trace();
}

}  // namespace internal

template <typename Scalar>
struct FrechetResult {
  Scalar distance = Scalar(0);
  bool jittered = false;  // both covariances got options.jitter * I
};

// ||mu1 - mu2||^2 + Tr(S1 + S2 - 2 (S1 S2)^1/2), clamped at 0.
template <typename Scalar>
FrechetResult<Scalar> FrechetDistanceDetailed(const GaussianStats<Scalar>& s1,
                                              const GaussianStats<Scalar>& s2,
                                              const FrechetOptions& options = {}) {
  if (s1.dim() != s2.dim() || s1.covariance.rows() != s1.dim() ||
      s2.covariance.rows() != s2.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "Gaussian statistics differ in dimension");
  }
  const Scalar mean_term = (s1.mean - s2.mean).squaredNorm();
  const Scalar tol = Scalar(options.residual_tolerance);
  std::optional<Scalar> tr =
      internal::TraceSqrtProduct<Scalar>(s1.covariance, s2.covariance, tol);
  Scalar trace_a = s1.covariance.trace();
  Scalar trace_b = s2.covariance.trace();
  FrechetResult<Scalar> result;
  if (!tr) {
    const MatrixX<Scalar> offset =
        MatrixX<Scalar>::Identity(s1.dim(), s1.dim()) * Scalar(options.jitter);
    const MatrixX<Scalar> a = s1.covariance + offset;
    const MatrixX<Scalar> b = s2.covariance + offset;
    tr = internal::TraceSqrtProduct<Scalar>(a, b, std::numeric_limits<Scalar>::max());
    trace_a = a.trace();
    trace_b = b.trace();
    result.jittered = true;
  }
  result.distance = std::max(Scalar(0), mean_term + trace_a + trace_b - Scalar(2) * *tr);
  return result;
}

template <typename Scalar>
Scalar FrechetDistance(const GaussianStats<Scalar>& s1,
                       const GaussianStats<Scalar>& s2,
                       const FrechetOptions& options = {}) {
  return FrechetDistanceDetailed(s1, s2, options).distance;
}

struct KernelConfig {
  int degree = 3;
  std::optional<double> gamma;  // unset: 1 / dim
  double coef0 = 1.0;
  std::optional<int> block_size;  // unset: min(1000, smaller set size)
  int blocks = 10;
  std::uint64_t seed = 0;
};

struct KidResult {
  double mean = 0.0;
  double stddev = 0.0;  // population stddev over blocks
  int block_size = 0;
  int blocks = 0;
  double gamma = 0.0;
  std::vector<double> block_values;
};

// (gamma * X Y^T + coef0)^degree
template <typename DerivedX, typename DerivedY>
MatrixX<typename DerivedX::Scalar> PolynomialKernel(
    const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y,
    int degree, typename DerivedX::Scalar gamma, typename DerivedX::Scalar coef0) {
  using Scalar = typename DerivedX::Scalar;
  MatrixX<Scalar> k = ((x * y.transpose()) * gamma).array() + coef0;
  return k.array().pow(Scalar(degree)).matrix();
}

// Unbiased MMD^2: within-set kernel means exclude the diagonal; the
// cross-set mean covers all pairs. Can be negative.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar UnbiasedMmd2(const Eigen::MatrixBase<DerivedX>& x,
                                       const Eigen::MatrixBase<DerivedY>& y,
                                       int degree, typename DerivedX::Scalar gamma,
                                       typename DerivedX::Scalar coef0) {
  using Scalar = typename DerivedX::Scalar;
  const Scalar m = Scalar(x.rows());
  const Scalar n = Scalar(y.rows());
  const MatrixX<Scalar> kxx = PolynomialKernel(x, x, degree, gamma, coef0);
  const MatrixX<Scalar> kyy = PolynomialKernel(y, y, degree, gamma, coef0);
  const MatrixX<Scalar> kxy = PolynomialKernel(x, y, degree, gamma, coef0);
  const Scalar xx = (kxx.sum() - kxx.trace()) / (m * (m - 1));
  const Scalar yy = (kyy.sum() - kyy.trace()) / (n * (n - 1));
  const Scalar xy = kxy.sum() / (m * n);
  return xx + yy - Scalar(2) * xy;
}

// Kernel inception distance: MMD^2 averaged over `blocks` random subsets of
// `block_size` rows drawn without replacement from each set.
template <typename DerivedX, typename DerivedY>
KidResult KidMmd2(const Eigen::MatrixBase<DerivedX>& x,
                  const Eigen::MatrixBase<DerivedY>& y, const KernelConfig& cfg) {
  using Scalar = typename DerivedX::Scalar;
  if (x.cols() != y.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "feature sets differ in dimension");
  }
  if (cfg.degree < 1 || cfg.blocks < 1) {
    throw Error(ErrorCode::kInvalidArgument, "kernel degree and blocks must be >= 1");
  }
  const Eigen::Index smaller = std::min(x.rows(), y.rows());
  const int block = cfg.block_size.value_or(
      static_cast<int>(std::min<Eigen::Index>(1000, smaller)));
  if (block < 2) {
    throw Error(ErrorCode::kTooFewSamples, "KID block size must be >= 2");
  }
  if (block > smaller) {
    throw Error(ErrorCode::kBlockTooLarge,
                "block size " + std::to_string(block) + " exceeds set size " +
                    std::to_string(smaller));
  }
  KidResult result;
  result.block_size = block;
  result.blocks = cfg.blocks;
  result.gamma = cfg.gamma.value_or(1.0 / static_cast<double>(x.cols()));

  std::mt19937_64 rng(cfg.seed);
  auto draw = [&](Eigen::Index total) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(total));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    // Partial Fisher-Yates: the first `block` slots are the sample.
    for (int i = 0; i < block; ++i) {
      std::uniform_int_distribution<Eigen::Index> pick(i, total - 1);
      std::swap(idx[static_cast<std::size_t>(i)],
                idx[static_cast<std::size_t>(pick(rng))]);
    }
    idx.resize(static_cast<std::size_t>(block));
    return idx;
  };

  for (int b = 0; b < cfg.blocks; ++b) {
    const auto ix = draw(x.rows());
    const auto iy = draw(y.rows());
    const MatrixX<Scalar> xs = x(ix, Eigen::all);
    const MatrixX<Scalar> ys = y(iy, Eigen::all);
    result.block_values.push_back(static_cast<double>(UnbiasedMmd2(
        xs, ys, cfg.degree, Scalar(result.gamma), Scalar(cfg.coef0))));
  }
  const double n = static_cast<double>(result.block_values.size());
  result.mean =
      std::accumulate(result.block_values.begin(), result.block_values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : result.block_values) ss += (v - result.mean) * (v - result.mean);
  result.stddev = std::sqrt(ss / n);
  return result;
}

}  // namespace camoval

#endif  // CAMOVAL_FEATSTATS_HPP_
