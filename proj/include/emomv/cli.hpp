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

// Batch front end: run configuration, the four subcommands and the
// exception-to-exit-code contract.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "emomv/eeg.hpp"
#include "emomv/iqa.hpp"
#include "emomv/report.hpp"

namespace emomv {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,
  kExitModel = 3,
  kExitConfig = 4,
};

// Maps library exceptions onto the exit-code contract.
int exit_code_for(const std::exception& e);

struct EegConfig {
  double fs_hz = 256.0;
  double window_s = kDefaultWindowS;
  double hop_s = kDefaultHopS;
  double event_k = kDefaultEventK;
  std::vector<FrequencyBand> bands = default_bands();
};

struct RunConfig {
  std::filesystem::path brisque_model_path;
  EegConfig eeg;
  DirectionMap directions = default_directions();
  Format output_format = Format::Markdown;
  int parallelism = 0;  // 0 means one worker per hardware thread

  // Throws ConfigError on non-positive numbers or unordered band edges.
  void validate() const;
  int resolved_parallelism() const;
};

// Flat `key = value` lines; `#` starts a comment. Keys:
//   brisque_model, output_format, parallelism (integer or "auto"),
//   eeg.fs_hz, eeg.window_s, eeg.hop_s, eeg.event_k,
//   eeg.band.<alpha|beta|gamma> = lo,hi
//   direction.<metric> = higher|lower
// Values are applied on top of `base`. Relative model paths resolve against
// `relative_to`.
RunConfig parse_run_config(std::istream& in, RunConfig base = {},
                           const std::filesystem::path& relative_to = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});
std::string serialize_run_config(const RunConfig& config);

// Reads `metric = direction` (or `direction.metric = direction`) lines into
// `directions`.
void merge_directions(std::istream& in, DirectionMap& directions);

struct IqaRun {
  std::vector<std::string> ids;  // file names, sorted
  std::vector<IqaRecord> records;
  StatsSet stats;
};

// Scores every .png/.jpg/.jpeg in `dir`. Undecodable files are logged to
// `log` and counted in stats.skipped_files.
IqaRun cmd_iqa(const std::filesystem::path& dir, const RunConfig& config, std::ostream& log,
               const std::string& label = {});

// `fs_flag` overrides eeg.fs_hz for CSV input; binary files carry their own.
StatsSet cmd_eeg(const std::filesystem::path& file, const RunConfig& config, std::ostream& log,
                 std::optional<double> fs_flag = std::nullopt, const std::string& label = {});

// Accepts the JSON or CSV statistics documents produced by the other commands.
StatsSet read_stats_file(const std::filesystem::path& path);
ComparisonTable cmd_compare(const std::filesystem::path& a, const std::filesystem::path& b, const RunConfig& config);

StatsSet cmd_ingest_scores(const std::filesystem::path& file, const std::string& metric = "vila",
                           const std::string& label = {});

// Whole program: argument parsing, config discovery (--config, else the
// EMOMV_EVAL_CONFIG environment variable), output and exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace emomv
