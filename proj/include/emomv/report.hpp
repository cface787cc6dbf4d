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

// Dataset-level aggregation and two-condition comparison tables.
//
// Table-style statistics use the sample standard deviation (n - 1); score
// files (externally produced aesthetic scores) report population variance.
// Both conventions are written into every JSON output.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emomv/errors.hpp"

namespace emomv {

struct MetricStats {
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::int64_t count = 0;
  std::int64_t skipped = 0;

  friend bool operator==(const MetricStats&, const MetricStats&) = default;
};

// Order-independent: values are summed in sorted order with compensation,
// so any permutation of the input yields bit-identical statistics.
MetricStats aggregate(std::span<const double> values, std::int64_t skipped = 0);
// Empty optionals are degenerate records; they are counted in `skipped`.
MetricStats aggregate(std::span<const std::optional<double>> values);

struct ScoreRow {
  std::string id;
  double score = 0.0;
};

using ScoreFile = std::vector<ScoreRow>;

// CSV with header `id,score`. Duplicate ids and malformed rows raise
// ParseError.
ScoreFile parse_score_csv(std::istream& in);
ScoreFile read_score_file(const std::string& path);

struct ScoreSummary {
  double mean = 0.0;
  double variance = 0.0;  // population
  std::int64_t count = 0;
};

ScoreSummary aggregate_scores(const ScoreFile& scores);

enum class Direction { HigherBetter, LowerBetter };
enum class Winner { A, B, Tie };

std::string_view to_string(Direction d);
std::string_view to_string(Winner w);
// Accepts higher/up/↑ and lower/down/↓ (case-insensitive).
Direction parse_direction(std::string_view text);

using DirectionMap = std::map<std::string, Direction, std::less<>>;

// sharpness, contrast, colorfulness, vila, beta, gamma higher-is-better;
// brisque and alpha lower-is-better.
DirectionMap default_directions();

// One metric row group of a statistics document.
struct MetricEntry {
  std::string name;
  MetricStats stats;
  std::optional<std::int64_t> events;  // EEG band rows
  std::optional<double> variance;      // score-file rows (population)
  std::optional<bool> reference_best;  // "best" marking carried over from an external table

  friend bool operator==(const MetricEntry&, const MetricEntry&) = default;
};

struct StatsSet {
  std::string label;
  std::string kind;  // "iqa", "eeg", "scores" or free-form
  std::vector<MetricEntry> metrics;
  std::int64_t skipped_files = 0;

  const MetricEntry* find(std::string_view name) const;
  friend bool operator==(const StatsSet&, const StatsSet&) = default;
};

struct ComparisonRow {
  std::string name;
  Direction direction = Direction::HigherBetter;
  MetricEntry a;
  MetricEntry b;
  Winner winner = Winner::Tie;
  std::optional<Winner> reference_winner;

  friend bool operator==(const ComparisonRow&, const ComparisonRow&) = default;
};

struct ComparisonTable {
  std::string label_a = "A";
  std::string label_b = "B";
  std::vector<ComparisonRow> rows;
  std::vector<std::string> warnings;

  friend bool operator==(const ComparisonTable&, const ComparisonTable&) = default;
};

inline constexpr double kTieRelTolerance = 1e-9;

// Winner from the sign of mean_a - mean_b under the direction; means equal
// within kTieRelTolerance (relative) tie.
Winner decide_winner(double mean_a, double mean_b, Direction direction);

// Rows follow the metric order of `a`. Throws SchemaError when the metric
// names differ or a metric has no direction. A row whose reference marking
// disagrees with the computed winner adds a warning.
ComparisonTable compare(const StatsSet& a, const StatsSet& b, const DirectionMap& directions);

enum class Format { Json, Csv, Markdown };

Format parse_format(std::string_view text);
std::string_view to_string(Format f);

std::string render(const StatsSet& stats, Format format);
std::string render(const ComparisonTable& table, Format format);

// Inverses of the JSON renderings.
StatsSet parse_stats_json(const std::string& text);
ComparisonTable parse_comparison_json(const std::string& text);
// Inverse of the CSV statistics rendering; the label is left empty.
StatsSet parse_stats_csv(const std::string& text);

// "Sharpness", "BRISQUE", "Alpha", ... for known names, else the name itself.
std::string display_name(std::string_view metric);

}  // namespace emomv
