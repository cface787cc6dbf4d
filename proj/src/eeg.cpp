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

#include "emomv/eeg.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <complex>
#include <numbers>

namespace emomv {

EegRecording::EegRecording(double sample_rate_hz, ChannelMatrix channels)
    : sample_rate_hz_(sample_rate_hz), channels_(std::move(channels)) {
  if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_)) {
    throw ConfigError("sample rate must be positive");
  }
  if (channels_.rows() < 1 || channels_.cols() < 1) throw LengthError("recording has no samples");
  if (!channels_.allFinite()) throw ParseError("recording holds non-finite samples");
}

std::string_view to_string(BandName name) {
  switch (name) {
    case BandName::Alpha:
      return "alpha";
    case BandName::Beta:
      return "beta";
    case BandName::Gamma:
      return "gamma";
  }
  return "unknown";
}

BandName parse_band_name(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "alpha") return BandName::Alpha;
  if (lower == "beta") return BandName::Beta;
  if (lower == "gamma") return BandName::Gamma;
  throw ConfigError("unknown frequency band '" + std::string(text) + "'");
}

namespace {

bool is_power_of_two(int n) { return n > 0 && std::has_single_bit(static_cast<unsigned>(n)); }

Eigen::VectorXd periodic_hann(int n) {
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w(i) = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  return w;
}

void check_band(const FrequencyBand& band, double nyquist) {
  if (!(band.lo_hz >= 0.0) || !(band.lo_hz < band.hi_hz)) {
    throw BandError("band " + std::string(to_string(band.name)) + " has invalid edges");
  }
  if (band.hi_hz > nyquist) {
    throw BandError("band " + std::string(to_string(band.name)) + " upper edge " + std::to_string(band.hi_hz) +
                    " Hz exceeds Nyquist " + std::to_string(nyquist) + " Hz");
  }
}

}  // namespace

Psd welch_psd(const Eigen::Ref<const Eigen::VectorXd>& signal, double fs, int segment_len, double overlap) {
  if (!(fs > 0.0)) throw ConfigError("sample rate must be positive");
  if (segment_len < 8 || !is_power_of_two(segment_len)) {
    throw LengthError("segment length must be a power of two >= 8, got " + std::to_string(segment_len));
  }
  if (!(overlap >= 0.0 && overlap < 1.0)) throw ConfigError("overlap must lie in [0, 1)");
  if (signal.size() < segment_len) {
    throw LengthError("signal of " + std::to_string(signal.size()) + " samples is shorter than one segment of " +
                      std::to_string(segment_len));
  }

  const int step = std::max(1, segment_len - static_cast<int>(std::lround(overlap * segment_len)));
  const Eigen::Index segments = (signal.size() - segment_len) / step + 1;
  const Eigen::VectorXd window = periodic_hann(segment_len);
  const int bins = segment_len / 2 + 1;

  Eigen::FFT<double> fft;
  std::vector<double> frame(segment_len);
  std::vector<std::complex<double>> spectrum;
  Eigen::VectorXd accum = Eigen::VectorXd::Zero(bins);
  for (Eigen::Index s = 0; s < segments; ++s) {
    Eigen::Map<Eigen::VectorXd>(frame.data(), segment_len) =
        signal.segment(s * step, segment_len).cwiseProduct(window);
    fft.fwd(spectrum, frame);
    for (int k = 0; k < bins; ++k) accum(k) += std::norm(spectrum[k]);
  }

  Psd psd;
  psd.freqs.resize(bins);
  for (int k = 0; k < bins; ++k) psd.freqs(k) = k * fs / segment_len;
  psd.power = accum / (static_cast<double>(segments) * fs * window.squaredNorm());
  // One-sided: fold negative frequencies except DC and Nyquist.
  psd.power.segment(1, bins - 2) *= 2.0;
  return psd;
}

double band_power(const Psd& psd, const FrequencyBand& band) {
  check_band(band, psd.nyquist_hz());
  const auto& f = psd.freqs;
  const auto& p = psd.power;
  double sum = 0.0;
  for (Eigen::Index k = 0; k + 1 < f.size(); ++k) {
    const double a = std::max(f(k), band.lo_hz);
    const double b = std::min(f(k + 1), band.hi_hz);
    if (b <= a) continue;
    const double width = f(k + 1) - f(k);
    const auto at = [&](double x) { return p(k) + (p(k + 1) - p(k)) * (x - f(k)) / width; };
    sum += 0.5 * (b - a) * (at(a) + at(b));
  }
  return std::max(sum, 0.0);
}

double total_power(const Psd& psd) {
  const auto& f = psd.freqs;
  const auto& p = psd.power;
  double sum = 0.0;
  for (Eigen::Index k = 0; k + 1 < f.size(); ++k) sum += 0.5 * (f(k + 1) - f(k)) * (p(k) + p(k + 1));
  return sum;
}

Eigen::VectorXd band_power_series(const EegRecording& recording, const FrequencyBand& band, double window_s,
                                  double hop_s) {
  const double fs = recording.sample_rate_hz();
  check_band(band, recording.nyquist_hz());
  if (!(band.lo_hz > 0.0) || window_s < 4.0 / band.lo_hz) {
    throw ConfigError("window of " + std::to_string(window_s) + " s holds fewer than 4 cycles of " +
                      std::string(to_string(band.name)) + " (needs >= " + std::to_string(4.0 / band.lo_hz) + " s)");
  }
  if (!(hop_s > 0.0) || hop_s > window_s) throw ConfigError("hop must be positive and no longer than the window");

  const auto window = static_cast<Eigen::Index>(std::lround(window_s * fs));
  const auto hop = std::max<Eigen::Index>(1, std::lround(hop_s * fs));
  if (window < 8) throw LengthError("analysis window is shorter than 8 samples");
  if (recording.samples_per_channel() < 2 * window) {
    throw LengthError("recording of " + std::to_string(recording.samples_per_channel()) +
                      " samples is shorter than two analysis windows (" + std::to_string(2 * window) + ")");
  }
  const int segment = static_cast<int>(std::bit_floor(static_cast<unsigned long>(window)));

  const Eigen::Index positions = (recording.samples_per_channel() - window) / hop + 1;
  Eigen::VectorXd series = Eigen::VectorXd::Zero(positions);
  const auto& channels = recording.channels();
  for (Eigen::Index i = 0; i < positions; ++i) {
    double sum = 0.0;
    for (Eigen::Index c = 0; c < channels.rows(); ++c) {
      const Eigen::VectorXd chunk = channels.row(c).segment(i * hop, window).transpose();
      sum += band_power(welch_psd(chunk, fs, segment, 0.5), band);
    }
    series(i) = sum / static_cast<double>(channels.rows());
  }
  return series;
}

int detect_events(const Eigen::Ref<const Eigen::VectorXd>& series, double k) {
  if (series.size() < 4) throw LengthError("event detection needs at least 4 values");
  if (!(k > 0.0)) throw ConfigError("event threshold multiplier must be positive");
  const double mean = series.mean();
  const double std = std::sqrt((series.array() - mean).square().sum() / static_cast<double>(series.size() - 1));
  if (std <= 1e-10 * std::abs(mean) || std == 0.0) return 0;
  const double threshold = mean + k * std;
  int events = 0;
  bool inside = false;
  for (double v : series) {
    const bool above = v > threshold;
    if (above && !inside) ++events;
    inside = above;
  }
  return events;
}

std::vector<BandSummary> summarize_bands(const EegRecording& recording, const std::vector<FrequencyBand>& bands,
                                         double window_s, double hop_s, double k) {
  for (const auto& band : bands) check_band(band, recording.nyquist_hz());
  std::vector<BandSummary> out;
  out.reserve(bands.size());
  for (const auto& band : bands) {
    BandSummary s;
    s.band = band;
    s.series = band_power_series(recording, band, window_s, hop_s);
    s.mean_power = s.series.mean();
    s.event_count = detect_events(s.series, k);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace emomv
