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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "test_util.hpp"

namespace emomv {
namespace {

Eigen::VectorXd tone(double freq, double amp, double fs, Eigen::Index n, double phase = 0.0) {
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = amp * std::sin(2 * std::numbers::pi * freq * i / fs + phase);
  return x;
}

Eigen::VectorXd white(double sigma, Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, sigma);
  Eigen::VectorXd x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

EegRecording single_channel(const Eigen::VectorXd& x, double fs) {
  return EegRecording(fs, ChannelMatrix(x.transpose()));
}

// Unscaled DFT power of one windowed segment, evaluated term by term.
double naive_bin_power(const Eigen::VectorXd& seg, int k) {
  std::complex<double> sum = 0.0;
  const auto n = static_cast<double>(seg.size());
  for (Eigen::Index t = 0; t < seg.size(); ++t) {
    sum += seg(t) * std::polar(1.0, -2.0 * std::numbers::pi * k * static_cast<double>(t) / n);
  }
  return std::norm(sum);
}

TEST(EegRecording, Invariants) {
  EXPECT_THROW(EegRecording(0.0, ChannelMatrix::Zero(1, 10)), ConfigError);
  EXPECT_THROW(EegRecording(256.0, ChannelMatrix(0, 0)), LengthError);
  ChannelMatrix bad = ChannelMatrix::Zero(2, 10);
  bad(1, 3) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(EegRecording(256.0, bad), ParseError);
  EXPECT_EQ(EegRecording(128.0, ChannelMatrix::Zero(1, 4)).nyquist_hz(), 64.0);
}

TEST(BandName, ParseAndPrint) {
  EXPECT_EQ(parse_band_name("Gamma"), BandName::Gamma);
  EXPECT_EQ(to_string(BandName::Alpha), "alpha");
  EXPECT_THROW(parse_band_name("theta"), ConfigError);
}

TEST(WelchPsd, GridAndZeroSignal) {
  const Psd psd = welch_psd(Eigen::VectorXd::Zero(1024), 256.0, 256, 0.5);
  ASSERT_EQ(psd.freqs.size(), 129);
  EXPECT_EQ(psd.freqs(0), 0.0);
  EXPECT_EQ(psd.nyquist_hz(), 128.0);
  for (Eigen::Index k = 1; k < psd.freqs.size(); ++k) EXPECT_GT(psd.freqs(k), psd.freqs(k - 1));
  EXPECT_TRUE((psd.power.array() == 0.0).all());
}

TEST(WelchPsd, MatchesNaiveDft) {
  const Eigen::VectorXd x = white(1.0, 96, 3);
  const int len = 32;
  const Psd psd = welch_psd(x, 100.0, len, 0.5);
  // Segments start at 0, 16, ..., 64.
  Eigen::VectorXd w(len);
  for (int i = 0; i < len; ++i) w(i) = 0.5 - 0.5 * std::cos(2 * std::numbers::pi * i / len);
  for (int k = 0; k <= len / 2; ++k) {
    double acc = 0.0;
    for (int s = 0; s < 5; ++s) acc += naive_bin_power(x.segment(16 * s, len).cwiseProduct(w), k);
    double expected = acc / (5 * 100.0 * w.squaredNorm());
    if (k > 0 && k < len / 2) expected *= 2;
    EXPECT_NEAR(psd.power(k), expected, 1e-12 * std::max(1.0, expected)) << "bin " << k;
  }
}

TEST(WelchPsd, ParsevalPureTone) {
  const double amp = 3.0;
  const Psd psd = welch_psd(tone(10.0, amp, 256.0, 2048), 256.0, 512, 0.5);
  EXPECT_NEAR(total_power(psd), amp * amp / 2, 0.02 * amp * amp / 2);
}

TEST(WelchPsd, ParsevalWhiteNoise) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const Eigen::VectorXd x = white(2.0, 8192, seed);
    const Psd psd = welch_psd(x, 256.0, 256, 0.5);
    EXPECT_NEAR(total_power(psd), x.squaredNorm() / x.size(), 0.05 * x.squaredNorm() / x.size());
    EXPECT_NEAR(total_power(psd), 4.0, 0.2);
  }
}

TEST(WelchPsd, Preconditions) {
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(100);
  EXPECT_THROW(welch_psd(x, 256.0, 48, 0.5), LengthError);
  EXPECT_THROW(welch_psd(x, 256.0, 4, 0.5), LengthError);
  EXPECT_THROW(welch_psd(x, 256.0, 128, 0.5), LengthError);
  EXPECT_THROW(welch_psd(x, 256.0, 64, 1.0), ConfigError);
  EXPECT_THROW(welch_psd(x, -1.0, 64, 0.5), ConfigError);
}

TEST(BandPower, ToneConcentratesInAlpha) {
  const Psd psd = welch_psd(tone(10.0, 1.0, 256.0, 2048), 256.0, 512, 0.5);
  const double total = total_power(psd);
  EXPECT_GE(band_power(psd, kAlpha), 0.95 * total);
  EXPECT_LE(band_power(psd, kGamma), 0.01 * total);
}

TEST(BandPower, ZeroPsdAndNyquist) {
  const Psd psd = welch_psd(Eigen::VectorXd::Zero(256), 64.0, 64, 0.5);
  EXPECT_EQ(band_power(psd, kAlpha), 0.0);
  EXPECT_THROW(band_power(psd, kGamma), BandError);
  EXPECT_THROW(band_power(psd, FrequencyBand{BandName::Beta, 20.0, 10.0}), BandError);
}

TEST(BandPower, AdditiveOverPartition) {
  const Eigen::VectorXd x = white(1.0, 4096, 9) + tone(21.3, 2.0, 256.0, 4096);
  const Psd psd = welch_psd(x, 256.0, 256, 0.5);
  const double edges[] = {0.0, 8.0, 13.0, 30.0, 45.0, 77.7, 128.0};
  double sum = 0.0;
  for (int i = 0; i + 1 < 7; ++i) sum += band_power(psd, FrequencyBand{BandName::Alpha, edges[i], edges[i + 1]});
  EXPECT_NEAR(sum, total_power(psd), 1e-9 * total_power(psd));
}

TEST(BandPower, QuadraticInAmplitude) {
  const Eigen::VectorXd x = white(1.0, 2048, 10) + tone(40.0, 1.0, 256.0, 2048);
  const Psd base = welch_psd(x, 256.0, 256, 0.5);
  for (double a : {0.5, 3.0, 17.0}) {
    const Psd scaled = welch_psd(a * x, 256.0, 256, 0.5);
    for (const auto& band : default_bands()) {
      EXPECT_NEAR(band_power(scaled, band), a * a * band_power(base, band), 1e-6 * a * a * band_power(base, band));
    }
  }
}

TEST(BandPowerSeries, StationaryToneIsFlat) {
  const auto rec = single_channel(tone(10.0, 1.0, 256.0, 256 * 20), 256.0);
  const Eigen::VectorXd s = band_power_series(rec, kAlpha, 1.0, 0.5);
  EXPECT_EQ(s.size(), 39);
  EXPECT_LE((s.maxCoeff() - s.minCoeff()) / s.mean(), 0.05);
}

TEST(BandPowerSeries, ZeroRecording) {
  const auto rec = single_channel(Eigen::VectorXd::Zero(256 * 4), 256.0);
  EXPECT_TRUE((band_power_series(rec, kBeta, 1.0, 0.5).array() == 0.0).all());
}

TEST(BandPowerSeries, AmplitudeDoublingQuadruplesPower) {
  Eigen::VectorXd x = tone(10.0, 1.0, 256.0, 256 * 20);
  x.tail(256 * 10) *= 2.0;
  const Eigen::VectorXd s = band_power_series(single_channel(x, 256.0), kAlpha, 1.0, 0.5);
  // Windows 0-17 lie wholly in the first half, 20-38 in the second.
  const double first = s.head(18).mean();
  const double second = s.tail(19).mean();
  EXPECT_NEAR(second / first, 4.0, 0.04);
}

TEST(BandPowerSeries, AveragesChannels) {
  ChannelMatrix m(2, 256 * 6);
  m.row(0) = tone(10.0, 1.0, 256.0, m.cols()).transpose();
  m.row(1) = tone(11.0, 3.0, 256.0, m.cols()).transpose();
  const Eigen::VectorXd both = band_power_series(EegRecording(256.0, m), kAlpha, 1.0, 0.5);
  const Eigen::VectorXd a = band_power_series(single_channel(m.row(0).transpose(), 256.0), kAlpha, 1.0, 0.5);
  const Eigen::VectorXd b = band_power_series(single_channel(m.row(1).transpose(), 256.0), kAlpha, 1.0, 0.5);
  EXPECT_LT((both - 0.5 * (a + b)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BandPowerSeries, Preconditions) {
  const auto rec = single_channel(Eigen::VectorXd::Zero(256 * 4), 256.0);
  EXPECT_THROW(band_power_series(rec, kAlpha, 0.25, 0.125), ConfigError);
  EXPECT_THROW(band_power_series(rec, kAlpha, 1.0, 2.0), ConfigError);
  EXPECT_THROW(band_power_series(rec, kAlpha, 3.0, 0.5), LengthError);
  const auto slow = single_channel(Eigen::VectorXd::Zero(64 * 4), 64.0);
  EXPECT_THROW(band_power_series(slow, kGamma, 1.0, 0.5), BandError);
}

Eigen::VectorXd baseline_with_bursts(int bursts, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.9, 1.1);
  Eigen::VectorXd s(100);
  for (auto& v : s) v = u(rng);
  for (int b = 0; b < bursts; ++b) s.segment(20 + 40 * b, 5).setConstant(10.0);
  return s;
}

TEST(DetectEvents, BurstCounts) {
  for (int bursts = 0; bursts <= 2; ++bursts) {
    EXPECT_EQ(detect_events(baseline_with_bursts(bursts, 7), 2.0), bursts);
  }
}

TEST(DetectEvents, HandThreshold) {
  // 100 values: 95 ones and 5 tens. mean 1.45, sample std 1.9716, threshold 5.39.
  Eigen::VectorXd s = Eigen::VectorXd::Ones(100);
  s.segment(50, 5).setConstant(10.0);
  EXPECT_EQ(detect_events(s, 2.0), 1);
  // A threshold above the burst height finds nothing.
  EXPECT_EQ(detect_events(s, 5.0), 0);
}

TEST(DetectEvents, ConstantSeries) {
  EXPECT_EQ(detect_events(Eigen::VectorXd::Constant(50, 3.7)), 0);
  EXPECT_EQ(detect_events(Eigen::VectorXd::Zero(50)), 0);
}

TEST(DetectEvents, AffineInvariant) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> d(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd s(200);
    for (auto& v : s) v = d(rng);
    for (int b = 0; b < trial % 4; ++b) s(10 + 50 * b) += 6.0;
    const int base = detect_events(s);
    for (auto [a, c] : {std::pair{3.0, 0.0}, {0.01, 5.0}, {1e4, -2e4}, {2.0, 1e3}}) {
      const Eigen::VectorXd t = (a * s.array() + c).matrix();
      EXPECT_EQ(detect_events(t), base) << "a=" << a << " c=" << c;
    }
  }
}

TEST(DetectEvents, Preconditions) {
  EXPECT_THROW(detect_events(Eigen::VectorXd::Ones(3)), LengthError);
  EXPECT_THROW(detect_events(Eigen::VectorXd::Ones(10), 0.0), ConfigError);
}

TEST(SummarizeBands, ZeroRecording) {
  const auto out = summarize_bands(single_channel(Eigen::VectorXd::Zero(256 * 10), 256.0), default_bands());
  ASSERT_EQ(out.size(), 3u);
  for (const auto& s : out) {
    EXPECT_EQ(s.mean_power, 0.0);
    EXPECT_EQ(s.event_count, 0);
  }
}

TEST(SummarizeBands, ToneRecording) {
  const auto rec = single_channel(tone(10.0, 20.0, 256.0, 256 * 30), 256.0);
  const auto out = summarize_bands(rec, default_bands());
  EXPECT_GT(out[0].mean_power, 20 * out[1].mean_power);
  EXPECT_GT(out[0].mean_power, 20 * out[2].mean_power);
  for (const auto& s : out) EXPECT_EQ(s.event_count, 0);
  const auto again = summarize_bands(rec, default_bands());
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_EQ(out[i].mean_power, again[i].mean_power);
    EXPECT_EQ(out[i].series, again[i].series);
  }
}

TEST(SummarizeBands, ChecksAllBandsFirst) {
  const auto rec = single_channel(white(1.0, 64 * 10, 1), 64.0);
  EXPECT_THROW(summarize_bands(rec, default_bands()), BandError);
}

TEST(EegIo, CsvRoundTrip) {
  ChannelMatrix m(3, 40);
  m.row(0) = white(1.0, 40, 1).transpose();
  m.row(1) = white(1e-7, 40, 2).transpose();
  m.row(2) = white(1e5, 40, 3).transpose();
  const EegRecording rec(250.0, m);
  std::stringstream ss;
  write_eeg_csv(ss, rec);
  EXPECT_EQ(read_eeg_csv(ss, 250.0), rec);
}

TEST(EegIo, BinaryRoundTrip) {
  ChannelMatrix m(2, 33);
  m.row(0) = white(1.0, 33, 4).transpose();
  m.row(1) = white(3.0, 33, 5).transpose();
  const EegRecording rec(512.0, m);
  std::stringstream ss;
  write_eeg_binary(ss, rec);
  EXPECT_EQ(read_eeg_binary(ss), rec);
}

TEST(EegIo, CsvErrors) {
  std::istringstream empty("");
  EXPECT_THROW(read_eeg_csv(empty, 256.0), ParseError);
  std::istringstream header("t,ch1\n0,1\n");
  EXPECT_THROW(read_eeg_csv(header, 256.0), ParseError);
  std::istringstream columns("time,ch1,ch2\n0,1,2\n0.1,3\n");
  EXPECT_THROW(read_eeg_csv(columns, 256.0), ParseError);
  std::istringstream number("time,ch1\n0,abc\n");
  EXPECT_THROW(read_eeg_csv(number, 256.0), ParseError);
  std::istringstream nan("time,ch1\n0,nan\n");
  EXPECT_THROW(read_eeg_csv(nan, 256.0), ParseError);
  std::istringstream none("time,ch1\n");
  EXPECT_THROW(read_eeg_csv(none, 256.0), ParseError);
}

TEST(EegIo, BinaryErrors) {
  std::istringstream magic("EEG2xxxxxxxxxxxxxxxxxxxxxxx");
  EXPECT_THROW(read_eeg_binary(magic), ParseError);
  const EegRecording rec(256.0, ChannelMatrix::Ones(1, 10));
  std::stringstream ss;
  write_eeg_binary(ss, rec);
  std::string bytes = ss.str();
  bytes.resize(bytes.size() - 3);
  std::istringstream truncated(bytes);
  EXPECT_THROW(read_eeg_binary(truncated), ParseError);
}

TEST(EegIo, FileDetection) {
  testing::TempDir dir("eegio");
  const EegRecording rec(128.0, ChannelMatrix::Ones(1, 10));
  {
    std::ofstream bin(dir / "r.eeg", std::ios::binary);
    write_eeg_binary(bin, rec);
    std::ofstream csv(dir / "r.csv");
    write_eeg_csv(csv, rec);
  }
  EXPECT_TRUE(is_eeg_binary_file(dir / "r.eeg"));
  EXPECT_FALSE(is_eeg_binary_file(dir / "r.csv"));
  EXPECT_EQ(read_eeg_file(dir / "r.eeg", 999.0).sample_rate_hz(), 128.0);
  EXPECT_EQ(read_eeg_file(dir / "r.csv", 128.0), rec);
}

}  // namespace
}  // namespace emomv
