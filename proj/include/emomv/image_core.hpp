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

// Rasters, color conversion and 2-D filtering shared by the image metrics.
//
// A Plane is a row-major Eigen array: rows() is the image height and cols()
// the width. All filtering functions are templated on the scalar type and
// accept any Eigen dense expression that evaluates to a plane.

#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "emomv/errors.hpp"

namespace emomv {

template <typename Scalar = double>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using PlaneD = Plane<double>;

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& p) {
  return p.derived().array().isFinite().all();
}

// Decoded 8-bit RGB raster. Pixels are stored row-major, one row of the
// pixel array per image pixel, columns R, G, B.
class ImageBuffer {
 public:
  using Pixels = Eigen::Array<std::uint8_t, Eigen::Dynamic, 3, Eigen::RowMajor>;
  using Rgb = std::array<std::uint8_t, 3>;

  ImageBuffer(int width, int height, Pixels pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width_ < 1 || height_ < 1) {
      throw DimensionError("image must be at least 1x1, got " + std::to_string(width_) + "x" +
                           std::to_string(height_));
    }
    if (pixels_.rows() != static_cast<Eigen::Index>(width_) * height_) {
      throw DimensionError("pixel count does not match image dimensions");
    }
  }

  static ImageBuffer filled(int width, int height, Rgb rgb) {
    Pixels px(static_cast<Eigen::Index>(std::max(width, 0)) * std::max(height, 0), 3);
    for (int c = 0; c < 3; ++c) px.col(c).setConstant(rgb[c]);
    return ImageBuffer(width, height, std::move(px));
  }

  int width() const { return width_; }
  int height() const { return height_; }
  const Pixels& pixels() const { return pixels_; }
  Pixels& pixels() { return pixels_; }

  Rgb at(int x, int y) const {
    const auto row = pixels_.row(static_cast<Eigen::Index>(y) * width_ + x);
    return {row(0), row(1), row(2)};
  }
  void set(int x, int y, Rgb rgb) {
    auto row = pixels_.row(static_cast<Eigen::Index>(y) * width_ + x);
    row << rgb[0], rgb[1], rgb[2];
  }

  // Channel c (0=R, 1=G, 2=B) as a height x width plane.
  template <typename Scalar = double>
  Plane<Scalar> channel(int c) const {
    using Strided = Eigen::Map<const Plane<std::uint8_t>, 0, Eigen::Stride<Eigen::Dynamic, 3>>;
    Strided view(pixels_.data() + c, height_, width_,
                 Eigen::Stride<Eigen::Dynamic, 3>(3 * static_cast<Eigen::Index>(width_), 3));
    return view.template cast<Scalar>();
  }

  friend bool operator==(const ImageBuffer& a, const ImageBuffer& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && (a.pixels_ == b.pixels_).all();
  }

 private:
  int width_;
  int height_;
  Pixels pixels_;
};

enum class BorderPolicy {
  Replicate,  // aaa|abcd|ddd
  Reflect,    // cb|abcd|cb (edge sample not repeated)
};

// Square filter kernel with an odd side length, applied as a correlation:
// weight (i, j) multiplies the sample at offset (i - r, j - r) from the
// output position, r = size / 2.
template <typename Scalar = double>
class Kernel {
 public:
  using Weights = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  explicit Kernel(Weights weights) : weights_(std::move(weights)) {
    if (weights_.rows() != weights_.cols() || weights_.rows() % 2 == 0) {
      throw DimensionError("kernel must be square with an odd side length");
    }
    if (!all_finite(weights_)) throw DimensionError("kernel weights must be finite");
  }

  int size() const { return static_cast<int>(weights_.rows()); }
  int radius() const { return size() / 2; }
  const Weights& weights() const { return weights_; }

  static Kernel identity(int size = 1) {
    Weights w = Weights::Zero(size, size);
    if (size % 2 == 1) w(size / 2, size / 2) = Scalar(1);
    return Kernel(std::move(w));
  }

  static Kernel laplacian() {
    Weights w(3, 3);
    w << 0, 1, 0, 1, -4, 1, 0, 1, 0;
    return Kernel(std::move(w));
  }

  static Kernel box(int size) {
    return Kernel(Weights::Constant(size, size, Scalar(1) / Scalar(size * size)));
  }

  // Sampled isotropic Gaussian normalized to unit sum.
  static Kernel gaussian(int size, Scalar sigma) {
    if (!(sigma > 0)) throw DimensionError("gaussian sigma must be positive");
    const int r = size / 2;
    Eigen::Array<Scalar, Eigen::Dynamic, 1> g(size);
    for (int i = 0; i < size; ++i) {
      const Scalar d = Scalar(i - r);
      g(i) = std::exp(-d * d / (Scalar(2) * sigma * sigma));
    }
    Weights w = (g.matrix() * g.matrix().transpose()).array();
    w /= w.sum();
    return Kernel(std::move(w));
  }

 private:
  Weights weights_;
};

namespace detail {

// Maps a possibly out-of-range index onto [0, n).
inline Eigen::Index border_index(Eigen::Index i, Eigen::Index n, BorderPolicy border) {
  if (i >= 0 && i < n) return i;
  if (border == BorderPolicy::Replicate || n == 1) return i < 0 ? 0 : n - 1;
  const Eigen::Index period = 2 * (n - 1);
  Eigen::Index m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - m;
}

template <typename Scalar>
Plane<Scalar> pad(const Plane<Scalar>& p, int r, BorderPolicy border) {
  const Eigen::Index h = p.rows(), w = p.cols();
  Plane<Scalar> out(h + 2 * r, w + 2 * r);
  for (Eigen::Index y = 0; y < out.rows(); ++y) {
    const Eigen::Index sy = border_index(y - r, h, border);
    for (Eigen::Index x = 0; x < out.cols(); ++x) {
      out(y, x) = p(sy, border_index(x - r, w, border));
    }
  }
  return out;
}

}  // namespace detail

template <typename Derived>
auto to_plane(const Eigen::DenseBase<Derived>& p) {
  return Plane<typename Derived::Scalar>(p.derived());
}

// Same-size filtered plane with the given border extension.
template <typename Derived, typename Scalar = typename Derived::Scalar>
Plane<Scalar> convolve2d(const Eigen::DenseBase<Derived>& input, const Kernel<Scalar>& kernel,
                         BorderPolicy border = BorderPolicy::Replicate) {
  const Plane<Scalar> p = input.derived();
  if (p.size() == 0) throw DimensionError("convolve2d: empty plane");
  const int r = kernel.radius();
  const Plane<Scalar> padded = detail::pad(p, r, border);
  Plane<Scalar> out = Plane<Scalar>::Zero(p.rows(), p.cols());
  for (int i = 0; i < kernel.size(); ++i) {
    for (int j = 0; j < kernel.size(); ++j) {
      const Scalar w = kernel.weights()(i, j);
      if (w == Scalar(0)) continue;
      out += w * padded.block(i, j, p.rows(), p.cols());
    }
  }
  return out;
}

// Halves each dimension by averaging 2x2 blocks; a trailing odd row or
// column is dropped.
template <typename Derived>
Plane<typename Derived::Scalar> downsample2x(const Eigen::DenseBase<Derived>& input) {
  using Scalar = typename Derived::Scalar;
  const Plane<Scalar> p = input.derived();
  if (p.rows() < 2 || p.cols() < 2) {
    throw DimensionError("downsample2x needs at least 2x2, got " + std::to_string(p.cols()) + "x" +
                         std::to_string(p.rows()));
  }
  const Eigen::Index h = p.rows() / 2, w = p.cols() / 2;
  using Strided = Eigen::Map<const Plane<Scalar>, 0, Eigen::Stride<Eigen::Dynamic, 2>>;
  const Eigen::Stride<Eigen::Dynamic, 2> stride(2 * p.cols(), 2);
  const Scalar* base = p.data();
  Strided tl(base, h, w, stride), tr(base + 1, h, w, stride);
  Strided bl(base + p.cols(), h, w, stride), br(base + p.cols() + 1, h, w, stride);
  return ((tl + tr) + (bl + br)) / Scalar(4);
}

// Rec.601 luma, Y = 0.299 R + 0.587 G + 0.114 B, on the [0, 255] scale.
template <typename Scalar = double>
Plane<Scalar> to_luminance(const ImageBuffer& img) {
  Plane<Scalar> y = Scalar(0.299) * img.channel<Scalar>(0) + Scalar(0.587) * img.channel<Scalar>(1) +
                    Scalar(0.114) * img.channel<Scalar>(2);
  // Rounding can push a white pixel a few ulps above 255.
  return y.cwiseMin(Scalar(255)).cwiseMax(Scalar(0));
}

// PNG or JPEG byte stream to RGB. Grayscale is replicated, alpha dropped.
ImageBuffer decode_image(std::span<const std::uint8_t> bytes);
ImageBuffer read_image_file(const std::filesystem::path& path);

// 8-bit RGB PNG encoding, used for fixtures and tooling.
std::vector<std::uint8_t> encode_png(const ImageBuffer& img);
void write_png_file(const ImageBuffer& img, const std::filesystem::path& path);

// Rounds and clamps a plane into an 8-bit gray image (R = G = B).
template <typename Derived>
ImageBuffer gray_image(const Eigen::DenseBase<Derived>& p) {
  const auto& d = p.derived();
  ImageBuffer::Pixels px(d.rows() * d.cols(), 3);
  for (Eigen::Index y = 0; y < d.rows(); ++y) {
    for (Eigen::Index x = 0; x < d.cols(); ++x) {
      const double v = std::clamp(std::round(static_cast<double>(d(y, x))), 0.0, 255.0);
      px.row(y * d.cols() + x).setConstant(static_cast<std::uint8_t>(v));
    }
  }
  return ImageBuffer(static_cast<int>(d.cols()), static_cast<int>(d.rows()), std::move(px));
}

}  // namespace emomv
