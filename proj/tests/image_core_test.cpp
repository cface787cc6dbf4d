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


#include "emomv/image_core.hpp"

#include <gtest/gtest.h>

#include <png.h>

#include <random>
#include <vector>

#include "test_util.hpp"

namespace emomv {
namespace {

using testing::gaussian_noise;

// Raw libpng writer for fixtures the encoder under test never produces
// (grayscale input).
std::vector<std::uint8_t> encode_gray_png(int w, int h, const std::vector<std::uint8_t>& values) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = w;
  image.height = h;
  image.format = PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  png_image_write_to_memory(&image, nullptr, &size, 0, values.data(), 0, nullptr);
  std::vector<std::uint8_t> out(size);
  EXPECT_TRUE(png_image_write_to_memory(&image, out.data(), &size, 0, values.data(), 0, nullptr));
  out.resize(size);
  return out;
}

// Direct evaluation of sum_ij k(i, j) p(y + i - r, x + j - r) with explicit
// border handling, independent of the padded implementation.
PlaneD brute_force_correlate(const PlaneD& p, const PlaneD& k, BorderPolicy border) {
  const int r = static_cast<int>(k.rows() / 2);
  PlaneD out(p.rows(), p.cols());
  const auto clampi = [&](Eigen::Index i, Eigen::Index n) -> Eigen::Index {
    if (border == BorderPolicy::Replicate) return std::clamp<Eigen::Index>(i, 0, n - 1);
    while (i < 0 || i >= n) i = i < 0 ? -i : 2 * (n - 1) - i;
    return i;
  };
  for (Eigen::Index y = 0; y < p.rows(); ++y) {
    for (Eigen::Index x = 0; x < p.cols(); ++x) {
      double sum = 0.0;
      for (int i = 0; i < k.rows(); ++i) {
        for (int j = 0; j < k.cols(); ++j) {
          sum += k(i, j) * p(clampi(y + i - r, p.rows()), clampi(x + j - r, p.cols()));
        }
      }
      out(y, x) = sum;
    }
  }
  return out;
}

TEST(ImageBuffer, RejectsBadDimensions) {
  EXPECT_THROW(ImageBuffer(0, 3, ImageBuffer::Pixels(0, 3)), DimensionError);
  EXPECT_THROW(ImageBuffer(2, 2, ImageBuffer::Pixels(3, 3)), DimensionError);
}

TEST(ImageBuffer, ChannelViewMatchesPixels) {
  ImageBuffer img = ImageBuffer::filled(3, 2, {0, 0, 0});
  img.set(2, 1, {10, 20, 30});
  const PlaneD g = img.channel(1);
  EXPECT_EQ(g.rows(), 2);
  EXPECT_EQ(g.cols(), 3);
  EXPECT_EQ(g(1, 2), 20.0);
  EXPECT_EQ(g.sum(), 20.0);
}

TEST(DecodeImage, SingleRedPixelRoundTrips) {
  const ImageBuffer red = ImageBuffer::filled(1, 1, {255, 0, 0});
  const ImageBuffer decoded = decode_image(encode_png(red));
  EXPECT_EQ(decoded, red);
}

TEST(DecodeImage, GrayscaleIsReplicated) {
  const ImageBuffer img = decode_image(encode_gray_png(2, 2, {0, 85, 170, 255}));
  ASSERT_EQ(img.width(), 2);
  ASSERT_EQ(img.height(), 2);
  const std::uint8_t expected[] = {0, 85, 170, 255};
  for (int i = 0; i < 4; ++i) {
    const auto px = img.at(i % 2, i / 2);
    EXPECT_EQ(px[0], expected[i]);
    EXPECT_EQ(px[1], expected[i]);
    EXPECT_EQ(px[2], expected[i]);
  }
}

TEST(DecodeImage, TruncatedPngThrows) {
  auto bytes = encode_png(testing::synthetic_photo(16, 16, 1));
  bytes.resize(bytes.size() / 2);
  EXPECT_THROW(decode_image(bytes), DecodeError);
}

TEST(DecodeImage, UnknownFormatThrows) {
  const std::vector<std::uint8_t> bytes = {'G', 'I', 'F', '8', '9', 'a', 0, 0};
  EXPECT_THROW(decode_image(bytes), DecodeError);
  EXPECT_THROW(decode_image({}), DecodeError);
}

TEST(DecodeImage, JpegFixtures) {
  const ImageBuffer gray = read_image_file(EMOMV_TEST_DATA "/gray_8x8.jpg");
  EXPECT_EQ(gray.width(), 8);
  for (int i = 0; i < 64; ++i) {
    const auto px = gray.at(i % 8, i / 8);
    EXPECT_NEAR(px[0], 120, 1);
    EXPECT_EQ(px[0], px[1]);
    EXPECT_EQ(px[1], px[2]);
  }
  const ImageBuffer solid = read_image_file(EMOMV_TEST_DATA "/solid_8x8.jpg");
  const auto px = solid.at(3, 3);
  EXPECT_NEAR(px[0], 200, 3);
  EXPECT_NEAR(px[1], 40, 3);
  EXPECT_NEAR(px[2], 90, 3);
}

TEST(DecodeImage, TruncatedJpegThrows) {
  const std::string bytes = testing::read_text(EMOMV_TEST_DATA "/solid_8x8.jpg");
  const std::vector<std::uint8_t> head(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(bytes.size() / 2));
  EXPECT_THROW(decode_image(head), DecodeError);
}

TEST(DecodeImage, MissingFileNamesPath) {
  try {
    read_image_file("/nonexistent/picture.png");
    FAIL() << "expected DecodeError";
  } catch (const DecodeError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/picture.png"), std::string::npos);
  }
}

TEST(ToLuminance, KnownColours) {
  EXPECT_TRUE((to_luminance(ImageBuffer::filled(4, 3, {255, 255, 255})) == 255.0).all());
  EXPECT_TRUE((to_luminance(ImageBuffer::filled(4, 3, {0, 0, 0})) == 0.0).all());
  const PlaneD red = to_luminance(ImageBuffer::filled(4, 3, {255, 0, 0}));
  EXPECT_NEAR(red(2, 3), 76.245, 1e-12);
  EXPECT_NEAR(red.maxCoeff() - red.minCoeff(), 0.0, 1e-15);
}

TEST(ToLuminance, StaysInRange) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    ImageBuffer::Pixels px(64, 3);
    for (Eigen::Index i = 0; i < px.size(); ++i) px.data()[i] = static_cast<std::uint8_t>(rng() % 256);
    const PlaneD y = to_luminance(ImageBuffer(8, 8, px));
    EXPECT_GE(y.minCoeff(), 0.0);
    EXPECT_LE(y.maxCoeff(), 255.0);
  }
}

TEST(Kernel, RejectsEvenOrNonSquare) {
  EXPECT_THROW(Kernel<double>(Kernel<double>::Weights::Ones(2, 2)), DimensionError);
  EXPECT_THROW(Kernel<double>(Kernel<double>::Weights::Ones(3, 5)), DimensionError);
  Kernel<double>::Weights w = Kernel<double>::Weights::Ones(3, 3);
  w(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Kernel<double>{w}, DimensionError);
}

TEST(Kernel, GaussianIsNormalisedAndSymmetric) {
  const auto g = Kernel<double>::gaussian(7, 7.0 / 6.0);
  EXPECT_NEAR(g.weights().sum(), 1.0, 1e-15);
  EXPECT_TRUE(g.weights().isApprox(g.weights().transpose()));
  EXPECT_TRUE(g.weights().isApprox(g.weights().rowwise().reverse()));
}

TEST(Convolve2d, IdentityKernel) {
  const PlaneD p = gaussian_noise(9, 11, 0.0, 1.0, 3);
  EXPECT_TRUE((convolve2d(p, Kernel<double>::identity()) == p).all());
  EXPECT_TRUE((convolve2d(p, Kernel<double>::identity(5), BorderPolicy::Reflect) == p).all());
}

TEST(Convolve2d, BoxOnConstant) {
  const PlaneD c = PlaneD::Constant(6, 5, 42.0);
  EXPECT_TRUE(convolve2d(c, Kernel<double>::box(3)).isApprox(c, 1e-14));
}

TEST(Convolve2d, LaplacianAnnihilatesRampInterior) {
  PlaneD ramp(8, 10);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 10; ++x) ramp(y, x) = x;
  }
  const PlaneD lap = convolve2d(ramp, Kernel<double>::laplacian(), BorderPolicy::Replicate);
  EXPECT_TRUE((lap.block(1, 1, 6, 8) == 0.0).all());
}

TEST(Convolve2d, MatchesBruteForce) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto border : {BorderPolicy::Replicate, BorderPolicy::Reflect}) {
    for (int size : {1, 3, 5, 7}) {
      PlaneD k(size, size);
      for (Eigen::Index i = 0; i < k.size(); ++i) k.data()[i] = n(rng);
      const PlaneD p = gaussian_noise(6, 9, 10.0, 5.0, 100 + size);
      const PlaneD got = convolve2d(p, Kernel<double>(k), border);
      EXPECT_LT((got - brute_force_correlate(p, k, border)).abs().maxCoeff(), 1e-12) << "size " << size;
    }
  }
}

TEST(Convolve2d, IsLinear) {
  const auto k = Kernel<double>::gaussian(5, 1.3);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const PlaneD p = gaussian_noise(7, 6, 0.0, 10.0, seed);
    const PlaneD q = gaussian_noise(7, 6, 3.0, 2.0, seed + 50);
    const double a = 1.7, b = -0.4;
    const PlaneD lhs = convolve2d(PlaneD(a * p + b * q), k);
    const PlaneD rhs = a * convolve2d(p, k) + b * convolve2d(q, k);
    EXPECT_LT((lhs - rhs).abs().maxCoeff(), 1e-9);
  }
}

TEST(Convolve2d, ConstantMapsToWeightSumTimesConstant) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto border : {BorderPolicy::Replicate, BorderPolicy::Reflect}) {
    PlaneD k(5, 5);
    for (Eigen::Index i = 0; i < k.size(); ++i) k.data()[i] = u(rng);
    const PlaneD out = convolve2d(PlaneD::Constant(4, 9, 3.5), Kernel<double>(k), border);
    EXPECT_LT((out - 3.5 * k.sum()).abs().maxCoeff(), 1e-12);
  }
}

TEST(Convolve2d, FloatScalar) {
  const Plane<float> p = Plane<float>::Constant(5, 5, 2.0f);
  const Plane<float> out = convolve2d(p, Kernel<float>::box(3));
  EXPECT_NEAR(out(2, 2), 2.0f, 1e-6f);
}

TEST(Downsample2x, BlockMean) {
  EXPECT_EQ(downsample2x(PlaneD::Zero(2, 2))(0, 0), 0.0);
  PlaneD p(2, 2);
  p << 0, 100, 100, 200;
  const PlaneD d = downsample2x(p);
  ASSERT_EQ(d.size(), 1);
  EXPECT_EQ(d(0, 0), 100.0);
  const PlaneD odd = downsample2x(PlaneD::Constant(3, 3, 7.25));
  ASSERT_EQ(odd.rows(), 1);
  ASSERT_EQ(odd.cols(), 1);
  EXPECT_EQ(odd(0, 0), 7.25);
}

TEST(Downsample2x, ConstantPreservedAndShape) {
  const PlaneD d = downsample2x(PlaneD::Constant(9, 14, 33.0));
  EXPECT_EQ(d.rows(), 4);
  EXPECT_EQ(d.cols(), 7);
  EXPECT_TRUE((d == 33.0).all());
  EXPECT_THROW(downsample2x(PlaneD::Zero(1, 5)), DimensionError);
}

TEST(Downsample2x, MatchesLoop) {
  const PlaneD p = gaussian_noise(7, 10, 0.0, 1.0, 9);
  const PlaneD d = downsample2x(p);
  for (Eigen::Index y = 0; y < d.rows(); ++y) {
    for (Eigen::Index x = 0; x < d.cols(); ++x) {
      const double m = (p(2 * y, 2 * x) + p(2 * y, 2 * x + 1) + p(2 * y + 1, 2 * x) + p(2 * y + 1, 2 * x + 1)) / 4;
      EXPECT_NEAR(d(y, x), m, 1e-14);
    }
  }
}

TEST(EncodePng, RoundTripsRandomImage) {
  const ImageBuffer img = testing::synthetic_photo(23, 17, 4);
  EXPECT_EQ(decode_image(encode_png(img)), img);
}

}  // namespace
}  // namespace emomv
