// Copyright 2026 The emomv-eval Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// No-reference image quality metrics: Laplacian-variance sharpness,
// Michelson contrast, Hasler-Suesstrunk colorfulness and BRISQUE.

#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>

#include "emomv/image_core.hpp"

namespace emomv {

// Population variance of the 5-point Laplacian over interior pixels
// (the one-pixel border ring is excluded).
template <typename Derived>
typename Derived::Scalar sharpness(const Eigen::DenseBase<Derived>& luminance) {
  using Scalar = typename Derived::Scalar;
  const Plane<Scalar> p = luminance.derived();
  if (p.rows() < 3 || p.cols() < 3) {
    throw DimensionError("sharpness needs at least 3x3, got " + std::to_string(p.cols()) + "x" +
                         std::to_string(p.rows()));
  }
  const Plane<Scalar> lap = convolve2d(p, Kernel<Scalar>::laplacian(), BorderPolicy::Replicate);
  const auto interior = lap.block(1, 1, lap.rows() - 2, lap.cols() - 2);
  const Scalar mean = interior.mean();
  return (interior - mean).square().mean();
}

// Michelson contrast (Lmax - Lmin) / (Lmax + Lmin); 0 for an all-black plane.
template <typename Derived>
typename Derived::Scalar contrast(const Eigen::DenseBase<Derived>& luminance) {
  using Scalar = typename Derived::Scalar;
  const Scalar lo = luminance.minCoeff();
  const Scalar hi = luminance.maxCoeff();
  if (hi + lo == Scalar(0)) return Scalar(0);
  return (hi - lo) / (hi + lo);
}

// Hasler-Suesstrunk colorfulness with rg = R - G, yb = (R + G) / 2 - B:
// sqrt(var_rg + var_yb) + 0.3 sqrt(mean_rg^2 + mean_yb^2).
double colorfulness(const ImageBuffer& img);

// Mean-subtracted contrast-normalized coefficients: (I - mu) / (sigma + 1)
// with a 7x7, sigma = 7/6 Gaussian window and replicated borders.
template <typename Derived>
Plane<typename Derived::Scalar> mscn(const Eigen::DenseBase<Derived>& luminance) {
  using Scalar = typename Derived::Scalar;
  if (luminance.rows() < 7 || luminance.cols() < 7) {
    throw DimensionError("mscn needs at least 7x7, got " + std::to_string(luminance.cols()) + "x" +
                         std::to_string(luminance.rows()));
  }
  // Centering on the minimum leaves the result unchanged mathematically and
  // makes it bit-identical under exact constant shifts.
  const Plane<Scalar> p = luminance.derived().array() - luminance.minCoeff();
  const auto window = Kernel<Scalar>::gaussian(7, Scalar(7) / Scalar(6));
  const Plane<Scalar> mu = convolve2d(p, window);
  const Plane<Scalar> second = convolve2d(p.square(), window);
  const Plane<Scalar> sigma = (second - mu.square()).cwiseMax(Scalar(0)).sqrt();
  return (p - mu) / (sigma + Scalar(1));
}

// Products of each coefficient with its right, lower, lower-right and
// lower-left neighbour. Positions whose neighbour falls outside are dropped.
template <typename Scalar = double>
struct PairwiseProducts {
  Plane<Scalar> horizontal;   // h x (w-1)
  Plane<Scalar> vertical;     // (h-1) x w
  Plane<Scalar> main_diag;    // (h-1) x (w-1)
  Plane<Scalar> second_diag;  // (h-1) x (w-1), D2(i, j) = m(i, j+1) m(i+1, j)
};

template <typename Derived>
PairwiseProducts<typename Derived::Scalar> pairwise_products(const Eigen::DenseBase<Derived>& coeffs) {
  using Scalar = typename Derived::Scalar;
  const Plane<Scalar> m = coeffs.derived();
  if (m.rows() < 2 || m.cols() < 2) throw DimensionError("pairwise_products needs at least 2x2");
  const Eigen::Index h = m.rows(), w = m.cols();
  PairwiseProducts<Scalar> out;
  out.horizontal = m.leftCols(w - 1) * m.rightCols(w - 1);
  out.vertical = m.topRows(h - 1) * m.bottomRows(h - 1);
  out.main_diag = m.topLeftCorner(h - 1, w - 1) * m.bottomRightCorner(h - 1, w - 1);
  out.second_diag = m.topRightCorner(h - 1, w - 1) * m.bottomLeftCorner(h - 1, w - 1);
  return out;
}

// Moment-matching grid: shape values 0.2, 0.201, ..., 10.
inline constexpr double kShapeGridMin = 0.2;
inline constexpr double kShapeGridMax = 10.0;
inline constexpr double kShapeGridStep = 0.001;
inline constexpr int kShapeGridSize = 9801;

// rho(g) = Gamma(2/g)^2 / (Gamma(1/g) Gamma(3/g)), increasing in g.
double shape_ratio(double shape);
// Grid shape whose ratio is closest to `target` (first on ties).
double invert_shape_ratio(double target);

inline constexpr std::size_t kMinFitSamples = 16;

struct GgdFit {
  double alpha = kShapeGridMax;
  double sigma_sq = 0.0;
  bool degenerate = false;  // all samples zero
};

struct AggdFit {
  double alpha = kShapeGridMax;
  double sigma_l_sq = 0.0;
  double sigma_r_sq = 0.0;
  double eta = 0.0;
  bool degenerate = false;  // one side empty; symmetric GGD fallback used
};

GgdFit fit_ggd(const Eigen::Ref<const Eigen::ArrayXd>& samples);
AggdFit fit_aggd(const Eigen::Ref<const Eigen::ArrayXd>& samples);

inline constexpr int kBrisqueFeatureCount = 36;

// Per scale: [ggd alpha, ggd sigma_sq], then for horizontal, vertical,
// main-diagonal, secondary-diagonal products [eta, alpha, sigma_l_sq,
// sigma_r_sq]. Entries 0-17 come from full resolution, 18-35 from the 2x
// downsampled plane.
struct BrisqueFeatures {
  Eigen::Matrix<double, kBrisqueFeatureCount, 1> values = decltype(values)::Zero();
  bool degenerate = false;
};

BrisqueFeatures brisque_features(const Eigen::Ref<const PlaneD>& luminance);

// RBF epsilon-SVR over features scaled to [-1, 1].
struct BrisqueModel {
  using FeatureVector = Eigen::Matrix<double, kBrisqueFeatureCount, 1>;
  using SupportVectors = Eigen::Matrix<double, Eigen::Dynamic, kBrisqueFeatureCount, Eigen::RowMajor>;

  std::string version;
  FeatureVector feature_min = FeatureVector::Zero();
  FeatureVector feature_max = FeatureVector::Zero();
  SupportVectors support_vectors;
  Eigen::VectorXd dual_coefs;
  double rbf_gamma = 1.0;
  double intercept = 0.0;

  // Throws ModelError when an invariant is violated.
  void validate() const;
  FeatureVector scale(const FeatureVector& raw) const;
};

BrisqueModel load_brisque_model(const std::filesystem::path& path);
BrisqueModel parse_brisque_model(const std::string& text);
std::string serialize_brisque_model(const BrisqueModel& model);

// Throws DegenerateInput for degenerate features.
double brisque_score(const BrisqueFeatures& features, const BrisqueModel& model);

struct IqaRecord {
  double sharpness = 0.0;
  double contrast = 0.0;
  double colorfulness = 0.0;
  std::optional<double> brisque;  // empty when the image is degenerate (constant)
};

IqaRecord iqa_all(const ImageBuffer& img, const BrisqueModel& model);

}  // namespace emomv
