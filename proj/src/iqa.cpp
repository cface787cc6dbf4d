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

#include "emomv/iqa.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace emomv {

namespace {

double grid_shape(int i) { return (200.0 + i) / 1000.0; }

const std::array<double, kShapeGridSize>& ratio_table() {
  static const auto table = [] {
    std::array<double, kShapeGridSize> t{};
    for (int i = 0; i < kShapeGridSize; ++i) t[i] = shape_ratio(grid_shape(i));
    return t;
  }();
  return table;
}

// Sum of squares of |x| taken in ascending order, so that two sides holding
// the same magnitudes produce bit-identical results.
double sorted_sum_of_squares(std::vector<double>& magnitudes) {
  std::sort(magnitudes.begin(), magnitudes.end());
  double sum = 0.0;
  for (double m : magnitudes) sum += m * m;
  return sum;
}

}  // namespace

double colorfulness(const ImageBuffer& img) {
  const PlaneD r = img.channel<double>(0);
  const PlaneD g = img.channel<double>(1);
  const PlaneD b = img.channel<double>(2);
  const PlaneD rg = r - g;
  const PlaneD yb = 0.5 * (r + g) - b;
  const double mean_rg = rg.mean();
  const double mean_yb = yb.mean();
  const double var_rg = (rg - mean_rg).square().mean();
  const double var_yb = (yb - mean_yb).square().mean();
  return std::sqrt(var_rg + var_yb) + 0.3 * std::sqrt(mean_rg * mean_rg + mean_yb * mean_yb);
}

double shape_ratio(double shape) {
  const double g2 = std::tgamma(2.0 / shape);
  return g2 * g2 / (std::tgamma(1.0 / shape) * std::tgamma(3.0 / shape));
}

double invert_shape_ratio(double target) {
  const auto& table = ratio_table();
  int best = 0;
  double best_diff = std::abs(table[0] - target);
  for (int i = 1; i < kShapeGridSize; ++i) {
    const double diff = std::abs(table[i] - target);
    if (diff < best_diff) {
      best_diff = diff;
      best = i;
    }
  }
  return grid_shape(best);
}

GgdFit fit_ggd(const Eigen::Ref<const Eigen::ArrayXd>& samples) {
  if (static_cast<std::size_t>(samples.size()) < kMinFitSamples) {
    throw LengthError("fit_ggd needs at least 16 samples, got " + std::to_string(samples.size()));
  }
  GgdFit fit;
  fit.sigma_sq = samples.square().mean();
  if (fit.sigma_sq == 0.0) {
    fit.alpha = kShapeGridMax;
    fit.degenerate = true;
    return fit;
  }
  const double mean_abs = samples.abs().mean();
  fit.alpha = invert_shape_ratio(mean_abs * mean_abs / fit.sigma_sq);
  return fit;
}

AggdFit fit_aggd(const Eigen::Ref<const Eigen::ArrayXd>& samples) {
  if (static_cast<std::size_t>(samples.size()) < kMinFitSamples) {
    throw LengthError("fit_aggd needs at least 16 samples, got " + std::to_string(samples.size()));
  }
  std::vector<double> left, right;
  left.reserve(samples.size());
  right.reserve(samples.size());
  for (double x : samples) (x < 0.0 ? left : right).push_back(std::abs(x));

  const auto fallback = [&] {
    const GgdFit g = fit_ggd(samples);
    AggdFit fit;
    fit.alpha = g.alpha;
    fit.sigma_l_sq = fit.sigma_r_sq = g.sigma_sq;
    fit.eta = 0.0;
    fit.degenerate = true;
    return fit;
  };
  if (left.empty() || right.empty()) return fallback();

  const double n_left = static_cast<double>(left.size());
  const double n_right = static_cast<double>(right.size());
  const double sum_sq_left = sorted_sum_of_squares(left);
  const double sum_sq_right = sorted_sum_of_squares(right);
  if (sum_sq_right == 0.0) return fallback();

  AggdFit fit;
  fit.sigma_l_sq = sum_sq_left / n_left;
  fit.sigma_r_sq = sum_sq_right / n_right;
  const double sigma_l = std::sqrt(fit.sigma_l_sq);
  const double sigma_r = std::sqrt(fit.sigma_r_sq);
  const double gamma_hat = sigma_l / sigma_r;
  const double n = static_cast<double>(samples.size());
  const double mean_abs = samples.abs().sum() / n;
  const double mean_sq = (sum_sq_left + sum_sq_right) / n;
  const double r_hat = mean_abs * mean_abs / mean_sq;
  const double big_r = r_hat * (gamma_hat * gamma_hat * gamma_hat + 1.0) * (gamma_hat + 1.0) /
                       std::pow(gamma_hat * gamma_hat + 1.0, 2);
  fit.alpha = invert_shape_ratio(big_r);
  const double a = fit.alpha;
  // Mean of the AGGD: (beta_r - beta_l) Gamma(2/a) / Gamma(1/a), beta = sigma sqrt(Gamma(1/a) / Gamma(3/a)).
  fit.eta = (sigma_r - sigma_l) * std::sqrt(std::tgamma(1.0 / a) / std::tgamma(3.0 / a)) *
            std::tgamma(2.0 / a) / std::tgamma(1.0 / a);
  return fit;
}

BrisqueFeatures brisque_features(const Eigen::Ref<const PlaneD>& luminance) {
  if (luminance.rows() < 14 || luminance.cols() < 14) {
    throw DimensionError("brisque needs at least 14x14, got " + std::to_string(luminance.cols()) + "x" +
                         std::to_string(luminance.rows()));
  }
  BrisqueFeatures out;
  PlaneD scale = luminance;
  int k = 0;
  const auto flat = [](const PlaneD& p) { return Eigen::Map<const Eigen::ArrayXd>(p.data(), p.size()); };
  for (int s = 0; s < 2; ++s) {
    const PlaneD coeffs = mscn(scale);
    const GgdFit g = fit_ggd(flat(coeffs));
    out.degenerate |= g.degenerate;
    out.values(k++) = g.alpha;
    out.values(k++) = g.sigma_sq;
    const auto products = pairwise_products(coeffs);
    for (const PlaneD* p : {&products.horizontal, &products.vertical, &products.main_diag, &products.second_diag}) {
      const AggdFit a = fit_aggd(flat(*p));
      out.degenerate |= a.degenerate;
      out.values(k++) = a.eta;
      out.values(k++) = a.alpha;
      out.values(k++) = a.sigma_l_sq;
      out.values(k++) = a.sigma_r_sq;
    }
    if (s == 0) scale = downsample2x(scale);
  }
  return out;
}

void BrisqueModel::validate() const {
  if (!(rbf_gamma > 0.0) || !std::isfinite(rbf_gamma)) throw ModelError("rbf_gamma must be positive");
  if (!std::isfinite(intercept)) throw ModelError("intercept must be finite");
  if ((feature_min.array() > feature_max.array()).any()) {
    throw ModelError("feature_min must not exceed feature_max");
  }
  if (support_vectors.rows() != dual_coefs.size()) {
    throw ModelError("support vector count (" + std::to_string(support_vectors.rows()) +
                     ") does not match dual coefficient count (" + std::to_string(dual_coefs.size()) + ")");
  }
  if (!support_vectors.allFinite() || !dual_coefs.allFinite() || !feature_min.allFinite() ||
      !feature_max.allFinite()) {
    throw ModelError("model parameters must be finite");
  }
}

BrisqueModel::FeatureVector BrisqueModel::scale(const FeatureVector& raw) const {
  const FeatureVector range = feature_max - feature_min;
  FeatureVector out;
  for (int i = 0; i < kBrisqueFeatureCount; ++i) {
    out(i) = range(i) > 0.0 ? -1.0 + 2.0 * (raw(i) - feature_min(i)) / range(i) : 0.0;
  }
  return out;
}

namespace {

using nlohmann::json;

std::vector<double> real_array(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_array()) {
    throw ModelError(std::string("model field '") + key + "' missing or not an array");
  }
  std::vector<double> out;
  for (const auto& v : doc.at(key)) {
    if (!v.is_number()) throw ModelError(std::string("model field '") + key + "' holds a non-number");
    out.push_back(v.get<double>());
  }
  return out;
}

BrisqueModel::FeatureVector feature_vector(const json& doc, const char* key) {
  const auto v = real_array(doc, key);
  if (v.size() != kBrisqueFeatureCount) {
    throw ModelError(std::string("model field '") + key + "' has " + std::to_string(v.size()) +
                     " entries, expected 36");
  }
  return Eigen::Map<const BrisqueModel::FeatureVector>(v.data());
}

double real_field(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_number()) {
    throw ModelError(std::string("model field '") + key + "' missing or not a number");
  }
  return doc.at(key).get<double>();
}

}  // namespace

BrisqueModel parse_brisque_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("model is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ModelError("model document must be an object");
  BrisqueModel m;
  if (!doc.contains("version") || !doc.at("version").is_string()) {
    throw ModelError("model field 'version' missing or not a string");
  }
  m.version = doc.at("version").get<std::string>();
  m.feature_min = feature_vector(doc, "feature_min");
  m.feature_max = feature_vector(doc, "feature_max");
  m.rbf_gamma = real_field(doc, "rbf_gamma");
  m.intercept = real_field(doc, "intercept");
  const auto coefs = real_array(doc, "dual_coefs");
  m.dual_coefs = Eigen::Map<const Eigen::VectorXd>(coefs.data(), static_cast<Eigen::Index>(coefs.size()));
  if (!doc.contains("support_vectors") || !doc.at("support_vectors").is_array()) {
    throw ModelError("model field 'support_vectors' missing or not an array");
  }
  const auto& rows = doc.at("support_vectors");
  m.support_vectors.resize(static_cast<Eigen::Index>(rows.size()), kBrisqueFeatureCount);
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != kBrisqueFeatureCount) {
      throw ModelError("support vector " + std::to_string(r) + " does not have 36 entries");
    }
    for (int c = 0; c < kBrisqueFeatureCount; ++c) {
      if (!row[c].is_number()) throw ModelError("support vector " + std::to_string(r) + " holds a non-number");
      m.support_vectors(r, c) = row[c].get<double>();
    }
    ++r;
  }
  m.validate();
  return m;
}

BrisqueModel load_brisque_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_brisque_model(ss.str());
  } catch (const ModelError& e) {
    throw ModelError(path.string() + ": " + e.what());
  }
}

std::string serialize_brisque_model(const BrisqueModel& model) {
  json doc;
  doc["format"] = "emomv-brisque-svr";
  doc["version"] = model.version;
  doc["feature_min"] = std::vector<double>(model.feature_min.data(), model.feature_min.data() + kBrisqueFeatureCount);
  doc["feature_max"] = std::vector<double>(model.feature_max.data(), model.feature_max.data() + kBrisqueFeatureCount);
  doc["rbf_gamma"] = model.rbf_gamma;
  doc["intercept"] = model.intercept;
  doc["dual_coefs"] = std::vector<double>(model.dual_coefs.data(), model.dual_coefs.data() + model.dual_coefs.size());
  json svs = json::array();
  for (Eigen::Index r = 0; r < model.support_vectors.rows(); ++r) {
    const auto row = model.support_vectors.row(r);
    svs.push_back(std::vector<double>(row.data(), row.data() + kBrisqueFeatureCount));
  }
  doc["support_vectors"] = std::move(svs);
  return doc.dump();
}

double brisque_score(const BrisqueFeatures& features, const BrisqueModel& model) {
  if (features.degenerate) throw DegenerateInput("brisque features are degenerate (constant image)");
  if (model.support_vectors.rows() != model.dual_coefs.size()) {
    throw ModelError("support vector count does not match dual coefficient count");
  }
  const BrisqueModel::FeatureVector x = model.scale(features.values);
  const Eigen::VectorXd dist_sq = (model.support_vectors.rowwise() - x.transpose()).rowwise().squaredNorm();
  return model.dual_coefs.dot((-model.rbf_gamma * dist_sq.array()).exp().matrix()) + model.intercept;
}

IqaRecord iqa_all(const ImageBuffer& img, const BrisqueModel& model) {
  if (img.width() < 14 || img.height() < 14) {
    throw DimensionError("image must be at least 14x14 for quality metrics, got " + std::to_string(img.width()) +
                         "x" + std::to_string(img.height()));
  }
  const PlaneD y = to_luminance(img);
  IqaRecord rec;
  rec.sharpness = sharpness(y);
  rec.contrast = contrast(y);
  rec.colorfulness = colorfulness(img);
  const BrisqueFeatures f = brisque_features(y);
  if (!f.degenerate) rec.brisque = brisque_score(f, model);
  return rec;
}

}  // namespace emomv
