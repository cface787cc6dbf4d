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

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "emomv/eeg.hpp"

namespace emomv {

namespace {

constexpr std::array<char, 4> kMagic = {'E', 'E', 'G', '1'};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view cell, std::size_t line_no) {
  double v = 0.0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ParseError("line " + std::to_string(line_no) + ": '" + std::string(cell) + "' is not a finite number");
  }
  return v;
}

template <typename T>
T read_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw ParseError("binary EEG stream is truncated");
  }
  std::uint64_t raw = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) raw |= std::uint64_t{bytes[i]} << (8 * i);
  if constexpr (std::is_same_v<T, double>) {
    return std::bit_cast<double>(raw);
  } else {
    return static_cast<T>(raw);
  }
}

template <typename T>
void write_le(std::ostream& out, T value) {
  std::uint64_t raw = 0;
  if constexpr (std::is_same_v<T, double>) {
    raw = std::bit_cast<std::uint64_t>(value);
  } else {
    raw = static_cast<std::uint64_t>(value);
  }
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((raw >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

}  // namespace

EegRecording read_eeg_csv(std::istream& in, double fs) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("EEG CSV is empty");
  const auto header = split_commas(line);
  if (header.size() < 2 || header.front() != "time") {
    throw ParseError("EEG CSV header must be 'time,ch1,...', got '" + line + "'");
  }
  const auto channels = static_cast<Eigen::Index>(header.size() - 1);
  std::vector<double> values;  // sample-major
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (static_cast<Eigen::Index>(cells.size()) != channels + 1) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(channels + 1) +
                       " columns, got " + std::to_string(cells.size()));
    }
    parse_number(cells[0], line_no);
    for (Eigen::Index c = 1; c <= channels; ++c) values.push_back(parse_number(cells[c], line_no));
  }
  const auto samples = static_cast<Eigen::Index>(values.size()) / channels;
  if (samples == 0) throw ParseError("EEG CSV has no samples");
  using SampleMajor = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  ChannelMatrix data = SampleMajor(values.data(), samples, channels).transpose();
  return EegRecording(fs, std::move(data));
}

EegRecording read_eeg_csv_file(const std::filesystem::path& path, double fs) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_eeg_csv(in, fs);
}

void write_eeg_csv(std::ostream& out, const EegRecording& recording) {
  out << "time";
  for (Eigen::Index c = 0; c < recording.channel_count(); ++c) out << ",ch" << (c + 1);
  out << '\n';
  std::ostringstream row;
  row.precision(17);
  for (Eigen::Index s = 0; s < recording.samples_per_channel(); ++s) {
    row.str("");
    row << static_cast<double>(s) / recording.sample_rate_hz();
    for (Eigen::Index c = 0; c < recording.channel_count(); ++c) row << ',' << recording.channels()(c, s);
    out << row.str() << '\n';
  }
}

EegRecording read_eeg_binary(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw ParseError("binary EEG stream does not start with 'EEG1'");
  }
  const auto channels = read_le<std::uint32_t>(in);
  const auto fs = read_le<double>(in);
  const auto samples = read_le<std::uint64_t>(in);
  if (channels == 0 || samples == 0) throw ParseError("binary EEG stream declares no samples");
  if (samples > (std::uint64_t{1} << 40) / channels) throw ParseError("binary EEG stream is implausibly large");
  ChannelMatrix data(channels, static_cast<Eigen::Index>(samples));
  for (Eigen::Index c = 0; c < data.rows(); ++c) {
    for (Eigen::Index s = 0; s < data.cols(); ++s) data(c, s) = read_le<double>(in);
  }
  if (!(fs > 0.0) || !std::isfinite(fs)) throw ParseError("binary EEG stream has a non-positive sample rate");
  return EegRecording(fs, std::move(data));
}

EegRecording read_eeg_binary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_eeg_binary(in);
}

void write_eeg_binary(std::ostream& out, const EegRecording& recording) {
  out.write(kMagic.data(), kMagic.size());
  write_le(out, static_cast<std::uint32_t>(recording.channel_count()));
  write_le(out, recording.sample_rate_hz());
  write_le(out, static_cast<std::uint64_t>(recording.samples_per_channel()));
  for (Eigen::Index c = 0; c < recording.channel_count(); ++c) {
    for (Eigen::Index s = 0; s < recording.samples_per_channel(); ++s) write_le(out, recording.channels()(c, s));
  }
}

bool is_eeg_binary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::array<char, 4> magic{};
  return in.read(magic.data(), magic.size()) && magic == kMagic;
}

EegRecording read_eeg_file(const std::filesystem::path& path, double csv_fs) {
  if (is_eeg_binary_file(path)) return read_eeg_binary_file(path);
  return read_eeg_csv_file(path, csv_fs);
}

}  // namespace emomv
