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


// Helpers shared by the unit tests and the acceptance runner.

#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "emomv/image_core.hpp"

namespace emomv::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("emomv-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline PlaneD gaussian_noise(Eigen::Index rows, Eigen::Index cols, double mean, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(mean, sigma);
  PlaneD p(rows, cols);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = dist(rng);
  return p;
}

// Smooth colour gradients plus seeded noise: textured enough for a
// non-degenerate BRISQUE fit.
inline ImageBuffer synthetic_photo(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 12.0);
  std::uniform_real_distribution<double> phase(0.0, 6.28);
  const double p0 = phase(rng), p1 = phase(rng), p2 = phase(rng);
  ImageBuffer::Pixels px(static_cast<Eigen::Index>(width) * height, 3);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double base[3] = {128 + 80 * std::sin(0.11 * x + p0), 128 + 80 * std::cos(0.07 * y + p1),
                              128 + 60 * std::sin(0.05 * (x + y) + p2)};
      for (int c = 0; c < 3; ++c) {
        px(static_cast<Eigen::Index>(y) * width + x, c) =
            static_cast<std::uint8_t>(std::clamp(std::round(base[c] + noise(rng)), 0.0, 255.0));
      }
    }
  }
  return ImageBuffer(width, height, std::move(px));
}

}  // namespace emomv::testing
