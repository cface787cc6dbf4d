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

// Frequency-band analysis of multi-channel EEG: Welch PSD, band power,
// sliding-window band-power series and threshold event counting.

#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "emomv/errors.hpp"

namespace emomv {

// Rows are channels, columns are samples.
using ChannelMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class EegRecording {
 public:
  EegRecording(double sample_rate_hz, ChannelMatrix channels);

  double sample_rate_hz() const { return sample_rate_hz_; }
  double nyquist_hz() const { return sample_rate_hz_ / 2.0; }
  const ChannelMatrix& channels() const { return channels_; }
  Eigen::Index channel_count() const { return channels_.rows(); }
  Eigen::Index samples_per_channel() const { return channels_.cols(); }

  friend bool operator==(const EegRecording& a, const EegRecording& b) {
    return a.sample_rate_hz_ == b.sample_rate_hz_ && a.channels_.rows() == b.channels_.rows() &&
           a.channels_.cols() == b.channels_.cols() && a.channels_ == b.channels_;
  }

 private:
  double sample_rate_hz_;
  ChannelMatrix channels_;
};

enum class BandName { Alpha, Beta, Gamma };

std::string_view to_string(BandName name);
// Case-insensitive; throws ConfigError for unknown names.
BandName parse_band_name(std::string_view text);

struct FrequencyBand {
  BandName name;
  double lo_hz;
  double hi_hz;
};

inline constexpr FrequencyBand kAlpha{BandName::Alpha, 8.0, 13.0};
inline constexpr FrequencyBand kBeta{BandName::Beta, 13.0, 30.0};
inline constexpr FrequencyBand kGamma{BandName::Gamma, 30.0, 45.0};

inline std::vector<FrequencyBand> default_bands() { return {kAlpha, kBeta, kGamma}; }

// One-sided power spectral density on the grid 0, fs/L, ..., fs/2.
struct Psd {
  Eigen::VectorXd freqs;
  Eigen::VectorXd power;

  double nyquist_hz() const { return freqs.size() ? freqs(freqs.size() - 1) : 0.0; }
};

// Averaged periodogram of Hann-windowed segments. Scaled as a density so the
// PSD integrates to the mean power of the signal.
Psd welch_psd(const Eigen::Ref<const Eigen::VectorXd>& signal, double fs, int segment_len, double overlap);

// Integral over [lo, hi] of the piecewise-linear PSD (trapezoid rule).
double band_power(const Psd& psd, const FrequencyBand& band);
double total_power(const Psd& psd);

// Band power in windows of `window_s` seconds every `hop_s` seconds, each
// window estimated with welch_psd (longest power-of-two segment that fits,
// 50% overlap) and averaged across channels.
Eigen::VectorXd band_power_series(const EegRecording& recording, const FrequencyBand& band, double window_s,
                                  double hop_s);

inline constexpr double kDefaultEventK = 2.0;
inline constexpr double kDefaultWindowS = 1.0;
inline constexpr double kDefaultHopS = 0.5;

// Number of maximal runs of values strictly above mean + k * std (sample
// std). A series whose spread is below 1e-10 of its level counts as constant.
int detect_events(const Eigen::Ref<const Eigen::VectorXd>& series, double k = kDefaultEventK);

struct BandSummary {
  FrequencyBand band;
  double mean_power = 0.0;
  int event_count = 0;
  Eigen::VectorXd series;
};

std::vector<BandSummary> summarize_bands(const EegRecording& recording, const std::vector<FrequencyBand>& bands,
                                         double window_s = kDefaultWindowS, double hop_s = kDefaultHopS,
                                         double k = kDefaultEventK);

// CSV: header `time,ch1,...`, one row per sample; the time column is ignored
// and the sample rate comes from the caller.
EegRecording read_eeg_csv(std::istream& in, double fs);
EegRecording read_eeg_csv_file(const std::filesystem::path& path, double fs);
void write_eeg_csv(std::ostream& out, const EegRecording& recording);

// Binary: "EEG1", u32 channel count, f64 sample rate, u64 samples per
// channel, then channel-major f64 samples; all little-endian.
EegRecording read_eeg_binary(std::istream& in);
EegRecording read_eeg_binary_file(const std::filesystem::path& path);
void write_eeg_binary(std::ostream& out, const EegRecording& recording);

// Picks the binary reader when the file starts with the magic bytes.
EegRecording read_eeg_file(const std::filesystem::path& path, double csv_fs);
bool is_eeg_binary_file(const std::filesystem::path& path);

}  // namespace emomv
