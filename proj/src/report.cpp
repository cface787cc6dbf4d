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

#include "emomv/report.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace emomv {

namespace {

using nlohmann::json;

constexpr const char* kStatsSchema = "emomv-stats/1";
constexpr const char* kComparisonSchema = "emomv-comparison/1";
constexpr const char* kStdConvention = "sample (n-1)";
constexpr const char* kVarianceConvention = "population (n)";

// Neumaier-compensated sum over values sorted ascending.
double stable_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double sum_sq_dev(std::span<const double> values, double mean) {
  std::vector<double> dev;
  dev.reserve(values.size());
  for (double v : values) dev.push_back((v - mean) * (v - mean));
  return stable_sum(std::move(dev));
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

// Shortest representation that round-trips.
std::string exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

MetricStats aggregate(std::span<const double> values, std::int64_t skipped) {
  if (values.empty()) throw EmptyInput("no values to aggregate (" + std::to_string(skipped) + " skipped)");
  MetricStats s;
  s.count = static_cast<std::int64_t>(values.size());
  s.skipped = skipped;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  const double n = static_cast<double>(values.size());
  s.mean = std::clamp(stable_sum({values.begin(), values.end()}) / n, s.min, s.max);
  s.std = values.size() > 1 ? std::sqrt(sum_sq_dev(values, s.mean) / (n - 1.0)) : 0.0;
  return s;
}

MetricStats aggregate(std::span<const std::optional<double>> values) {
  std::vector<double> kept;
  std::int64_t skipped = 0;
  for (const auto& v : values) {
    if (v) {
      kept.push_back(*v);
    } else {
      ++skipped;
    }
  }
  return aggregate(kept, skipped);
}

ScoreFile parse_score_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  ScoreFile out;
  std::set<std::string, std::less<>> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto comma = text.find(',');
    if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected two columns 'id,score'");
    }
    const auto id = trim(text.substr(0, comma));
    const auto value = trim(text.substr(comma + 1));
    if (!have_header) {
      if (lower(id) != "id" || lower(value) != "score") {
        throw ParseError("score file header must be 'id,score'");
      }
      have_header = true;
      continue;
    }
    if (id.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty id");
    double score = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), score);
    if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(score)) {
      throw ParseError("line " + std::to_string(line_no) + ": '" + std::string(value) + "' is not a finite score");
    }
    if (!seen.emplace(id).second) {
      throw ParseError("line " + std::to_string(line_no) + ": duplicate id '" + std::string(id) + "'");
    }
    out.push_back({std::string(id), score});
  }
  return out;
}

ScoreFile read_score_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return parse_score_csv(in);
}

ScoreSummary aggregate_scores(const ScoreFile& scores) {
  if (scores.empty()) throw EmptyInput("score file has no rows");
  std::vector<double> v;
  v.reserve(scores.size());
  for (const auto& row : scores) v.push_back(row.score);
  const double n = static_cast<double>(v.size());
  ScoreSummary s;
  s.count = static_cast<std::int64_t>(v.size());
  s.mean = stable_sum(v) / n;
  s.variance = sum_sq_dev(v, s.mean) / n;
  return s;
}

std::string_view to_string(Direction d) { return d == Direction::HigherBetter ? "higher" : "lower"; }

std::string_view to_string(Winner w) {
  switch (w) {
    case Winner::A:
      return "A";
    case Winner::B:
      return "B";
    case Winner::Tie:
      return "tie";
  }
  return "tie";
}

namespace {

Winner parse_winner(std::string_view text) {
  if (text == "A") return Winner::A;
  if (text == "B") return Winner::B;
  if (text == "tie") return Winner::Tie;
  throw ParseError("unknown winner '" + std::string(text) + "'");
}

}  // namespace

Direction parse_direction(std::string_view text) {
  const auto t = lower(trim(text));
  if (t == "higher" || t == "up" || t == "higherbetter" || t == "\xE2\x86\x91") return Direction::HigherBetter;
  if (t == "lower" || t == "down" || t == "lowerbetter" || t == "\xE2\x86\x93") return Direction::LowerBetter;
  throw ConfigError("unknown direction '" + std::string(text) + "' (use higher or lower)");
}

DirectionMap default_directions() {
  return {
      {"sharpness", Direction::HigherBetter}, {"contrast", Direction::HigherBetter},
      {"colorfulness", Direction::HigherBetter}, {"brisque", Direction::LowerBetter},
      {"alpha", Direction::LowerBetter},      {"beta", Direction::HigherBetter},
      {"gamma", Direction::HigherBetter},     {"vila", Direction::HigherBetter},
  };
}

const MetricEntry* StatsSet::find(std::string_view name) const {
  for (const auto& m : metrics) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

Winner decide_winner(double mean_a, double mean_b, Direction direction) {
  const double scale = std::max(std::abs(mean_a), std::abs(mean_b));
  if (std::abs(mean_a - mean_b) <= kTieRelTolerance * scale) return Winner::Tie;
  const bool a_higher = mean_a > mean_b;
  return (a_higher == (direction == Direction::HigherBetter)) ? Winner::A : Winner::B;
}

ComparisonTable compare(const StatsSet& a, const StatsSet& b, const DirectionMap& directions) {
  for (const auto& m : b.metrics) {
    if (!a.find(m.name)) throw SchemaError("metric '" + m.name + "' appears only in " + b.label);
  }
  ComparisonTable table;
  table.label_a = a.label.empty() ? "A" : a.label;
  table.label_b = b.label.empty() ? "B" : b.label;
  for (const auto& ma : a.metrics) {
    const MetricEntry* mb = b.find(ma.name);
    if (!mb) throw SchemaError("metric '" + ma.name + "' appears only in " + a.label);
    const auto dir = directions.find(ma.name);
    if (dir == directions.end()) throw SchemaError("metric '" + ma.name + "' has no configured direction");
    ComparisonRow row;
    row.name = ma.name;
    row.direction = dir->second;
    row.a = ma;
    row.b = *mb;
    row.winner = decide_winner(ma.stats.mean, mb->stats.mean, row.direction);
    const bool ref_a = ma.reference_best.value_or(false);
    const bool ref_b = mb->reference_best.value_or(false);
    if (ref_a != ref_b) row.reference_winner = ref_a ? Winner::A : Winner::B;
    if (row.reference_winner && row.winner != Winner::Tie && *row.reference_winner != row.winner) {
      const auto& marked = *row.reference_winner == Winner::A ? table.label_a : table.label_b;
      const auto& computed = row.winner == Winner::A ? table.label_a : table.label_b;
      table.warnings.push_back("direction inconsistency for " + row.name + ": configured direction '" +
                               std::string(to_string(row.direction)) + "' makes " + computed +
                               " the winner, but the reference marks " + marked + " as best");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Format parse_format(std::string_view text) {
  const auto t = lower(trim(text));
  if (t == "json") return Format::Json;
  if (t == "csv") return Format::Csv;
  if (t == "markdown" || t == "md") return Format::Markdown;
  throw ConfigError("unknown output format '" + std::string(text) + "' (use json, csv or markdown)");
}

std::string_view to_string(Format f) {
  switch (f) {
    case Format::Json:
      return "json";
    case Format::Csv:
      return "csv";
    case Format::Markdown:
      return "markdown";
  }
  return "markdown";
}

std::string display_name(std::string_view metric) {
  static const std::map<std::string, std::string, std::less<>> names = {
      {"sharpness", "Sharpness"}, {"contrast", "Contrast"}, {"colorfulness", "Colorfulness"},
      {"brisque", "BRISQUE"},     {"alpha", "Alpha"},       {"beta", "Beta"},
      {"gamma", "Gamma"},         {"vila", "VILA"},
  };
  const auto it = names.find(metric);
  return it == names.end() ? std::string(metric) : it->second;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json entry_to_json(const MetricEntry& m) {
  json j;
  j["name"] = m.name;
  j["mean"] = m.stats.mean;
  j["std"] = m.stats.std;
  j["min"] = m.stats.min;
  j["max"] = m.stats.max;
  j["count"] = m.stats.count;
  j["skipped"] = m.stats.skipped;
  if (m.events) j["events"] = *m.events;
  if (m.variance) j["variance"] = *m.variance;
  if (m.reference_best) j["reference_best"] = *m.reference_best;
  return j;
}

template <typename T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw SchemaError(std::string("field '") + key + "' has the wrong type");
  }
}

MetricEntry entry_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("metric entry must be an object");
  MetricEntry m;
  m.name = required<std::string>(j, "name");
  m.stats.mean = required<double>(j, "mean");
  m.stats.std = required<double>(j, "std");
  m.stats.min = required<double>(j, "min");
  m.stats.max = required<double>(j, "max");
  m.stats.count = required<std::int64_t>(j, "count");
  m.stats.skipped = j.value("skipped", std::int64_t{0});
  if (j.contains("events")) m.events = required<std::int64_t>(j, "events");
  if (j.contains("variance")) m.variance = required<double>(j, "variance");
  if (j.contains("reference_best")) m.reference_best = required<bool>(j, "reference_best");
  return m;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

json stats_to_json(const StatsSet& s) {
  json j;
  j["schema"] = kStatsSchema;
  j["kind"] = s.kind;
  j["label"] = s.label;
  j["skipped_files"] = s.skipped_files;
  j["std_convention"] = kStdConvention;
  j["variance_convention"] = kVarianceConvention;
  json metrics = json::array();
  for (const auto& m : s.metrics) metrics.push_back(entry_to_json(m));
  j["metrics"] = std::move(metrics);
  return j;
}

json table_to_json(const ComparisonTable& t) {
  json j;
  j["schema"] = kComparisonSchema;
  j["label_a"] = t.label_a;
  j["label_b"] = t.label_b;
  j["std_convention"] = kStdConvention;
  j["variance_convention"] = kVarianceConvention;
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row;
    row["name"] = r.name;
    row["direction"] = std::string(to_string(r.direction));
    row["a"] = entry_to_json(r.a);
    row["b"] = entry_to_json(r.b);
    row["winner"] = std::string(to_string(r.winner));
    if (r.reference_winner) row["reference_winner"] = std::string(to_string(*r.reference_winner));
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  j["warnings"] = t.warnings;
  return j;
}

}  // namespace

StatsSet parse_stats_json(const std::string& text) {
  const json j = parse_json(text);
  if (!j.is_object() || j.value("schema", std::string()) != kStatsSchema) {
    throw SchemaError(std::string("not a statistics document (expected schema '") + kStatsSchema + "')");
  }
  StatsSet s;
  s.kind = j.value("kind", std::string());
  s.label = j.value("label", std::string());
  s.skipped_files = j.value("skipped_files", std::int64_t{0});
  if (!j.contains("metrics") || !j.at("metrics").is_array()) throw SchemaError("missing 'metrics' array");
  std::set<std::string, std::less<>> names;
  for (const auto& m : j.at("metrics")) {
    s.metrics.push_back(entry_from_json(m));
    if (!names.insert(s.metrics.back().name).second) {
      throw SchemaError("metric '" + s.metrics.back().name + "' is listed twice");
    }
  }
  return s;
}

ComparisonTable parse_comparison_json(const std::string& text) {
  const json j = parse_json(text);
  if (!j.is_object() || j.value("schema", std::string()) != kComparisonSchema) {
    throw SchemaError(std::string("not a comparison document (expected schema '") + kComparisonSchema + "')");
  }
  ComparisonTable t;
  t.label_a = required<std::string>(j, "label_a");
  t.label_b = required<std::string>(j, "label_b");
  for (const auto& r : j.at("rows")) {
    ComparisonRow row;
    row.name = required<std::string>(r, "name");
    row.direction = parse_direction(required<std::string>(r, "direction"));
    row.a = entry_from_json(r.at("a"));
    row.b = entry_from_json(r.at("b"));
    row.winner = parse_winner(required<std::string>(r, "winner"));
    if (r.contains("reference_winner")) row.reference_winner = parse_winner(required<std::string>(r, "reference_winner"));
    t.rows.push_back(std::move(row));
  }
  t.warnings = j.value("warnings", std::vector<std::string>{});
  return t;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string csv_cell(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_entry(const MetricEntry& m) {
  std::string out = exact(m.stats.mean) + "," + exact(m.stats.std) + "," + exact(m.stats.min) + "," +
                    exact(m.stats.max) + "," + std::to_string(m.stats.count) + "," + std::to_string(m.stats.skipped);
  out += "," + (m.events ? std::to_string(*m.events) : std::string());
  out += "," + (m.variance ? exact(*m.variance) : std::string());
  return out;
}

constexpr const char* kCsvEntryHeader = "mean,std,min,max,count,skipped,events,variance";

std::string prefixed_header(const char* prefix) {
  std::string out;
  std::string_view fields = kCsvEntryHeader;
  while (!fields.empty()) {
    const auto comma = fields.find(',');
    if (!out.empty()) out += ',';
    out += prefix;
    out += fields.substr(0, comma);
    if (comma == std::string_view::npos) break;
    fields.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

template <typename T>
T csv_number(const std::string& cell, std::size_t line_no) {
  T v{};
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw ParseError("line " + std::to_string(line_no) + ": '" + cell + "' is not a number");
  }
  return v;
}

}  // namespace

StatsSet parse_stats_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line) != std::string("metric,") + kCsvEntryHeader) {
    throw SchemaError(std::string("statistics CSV header must be 'metric,") + kCsvEntryHeader + "'");
  }
  StatsSet s;
  std::set<std::string, std::less<>> names;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(trim(line));
    if (cells.size() != 9) throw SchemaError("line " + std::to_string(line_no) + ": expected 9 columns");
    MetricEntry m;
    m.name = cells[0];
    m.stats.mean = csv_number<double>(cells[1], line_no);
    m.stats.std = csv_number<double>(cells[2], line_no);
    m.stats.min = csv_number<double>(cells[3], line_no);
    m.stats.max = csv_number<double>(cells[4], line_no);
    m.stats.count = csv_number<std::int64_t>(cells[5], line_no);
    m.stats.skipped = csv_number<std::int64_t>(cells[6], line_no);
    if (!cells[7].empty()) m.events = csv_number<std::int64_t>(cells[7], line_no);
    if (!cells[8].empty()) m.variance = csv_number<double>(cells[8], line_no);
    if (!names.insert(m.name).second) throw SchemaError("metric '" + m.name + "' is listed twice");
    s.metrics.push_back(std::move(m));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Markdown

namespace {

enum class RowShape { MeanStd, MeanEvents, MeanVariance };

RowShape shape_of(const MetricEntry& m) {
  if (m.events) return RowShape::MeanEvents;
  if (m.variance) return RowShape::MeanVariance;
  return RowShape::MeanStd;
}

std::string arrow(Direction d) { return d == Direction::HigherBetter ? " \xE2\x86\x91" : " \xE2\x86\x93"; }

struct CellPair {
  std::string first;
  std::string second;
};

CellPair cells(const MetricEntry& m, RowShape shape) {
  if (m.stats.count == 0) return {"-", shape == RowShape::MeanEvents && m.events ? std::to_string(*m.events) : "-"};
  switch (shape) {
    case RowShape::MeanEvents:
      return {fixed(m.stats.mean, 2), m.events ? std::to_string(*m.events) : std::string("-")};
    case RowShape::MeanVariance:
      return {fixed(m.stats.mean, 4), m.variance ? fixed(*m.variance, 4) : std::string("-")};
    case RowShape::MeanStd:
      break;
  }
  return {fixed(m.stats.mean, 2) + " \xC2\xB1 " + fixed(m.stats.std, 2),
          "(" + fixed(m.stats.min, 2) + ", " + fixed(m.stats.max, 2) + ")"};
}

CellPair labels(RowShape shape) {
  switch (shape) {
    case RowShape::MeanEvents:
      return {"Mean", "Events"};
    case RowShape::MeanVariance:
      return {"mean", "variance"};
    case RowShape::MeanStd:
      break;
  }
  return {"(Mean \xC2\xB1 Std)", "(Min, Max)"};
}

std::string md_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string render(const StatsSet& stats, Format format) {
  switch (format) {
    case Format::Json:
      return stats_to_json(stats).dump(2) + "\n";
    case Format::Csv: {
      std::string out = std::string("metric,") + kCsvEntryHeader + "\n";
      for (const auto& m : stats.metrics) out += csv_cell(m.name) + "," + csv_entry(m) + "\n";
      return out;
    }
    case Format::Markdown:
      break;
  }
  const std::string label = stats.label.empty() ? "Value" : md_escape(stats.label);
  std::string out = "| Metric | | " + label + " |\n| --- | --- | ---: |\n";
  for (const auto& m : stats.metrics) {
    const auto shape = shape_of(m);
    const auto l = labels(shape);
    const auto c = cells(m, shape);
    out += "| " + md_escape(display_name(m.name)) + " | " + l.first + " | " + c.first + " |\n";
    out += "| | " + l.second + " | " + c.second + " |\n";
  }
  out += "\n";
  for (const auto& m : stats.metrics) {
    out += "- " + md_escape(display_name(m.name)) + ": n = " + std::to_string(m.stats.count) +
           ", skipped = " + std::to_string(m.stats.skipped) + "\n";
  }
  if (stats.skipped_files > 0) out += "- unreadable files skipped: " + std::to_string(stats.skipped_files) + "\n";
  out += std::string("- std: ") + kStdConvention + "\n";
  return out;
}

std::string render(const ComparisonTable& table, Format format) {
  switch (format) {
    case Format::Json:
      return table_to_json(table).dump(2) + "\n";
    case Format::Csv: {
      std::string out = "metric,direction," + prefixed_header("a_") + "," + prefixed_header("b_") + ",winner\n";
      for (const auto& r : table.rows) {
        out += csv_cell(r.name) + "," + std::string(to_string(r.direction)) + "," + csv_entry(r.a) + "," +
               csv_entry(r.b) + "," + std::string(to_string(r.winner)) + "\n";
      }
      return out;
    }
    case Format::Markdown:
      break;
  }
  std::string out = "| Metric | | " + md_escape(table.label_a) + " | " + md_escape(table.label_b) +
                    " |\n| --- | --- | ---: | ---: |\n";
  for (const auto& r : table.rows) {
    const auto shape = shape_of(r.a);
    const auto l = labels(shape);
    auto ca = cells(r.a, shape);
    auto cb = cells(r.b, shape);
    if (r.winner == Winner::A) ca.first = "**" + ca.first + "**";
    if (r.winner == Winner::B) cb.first = "**" + cb.first + "**";
    out += "| " + md_escape(display_name(r.name)) + " | " + l.first + arrow(r.direction) + " | " + ca.first + " | " +
           cb.first + " |\n";
    out += "| | " + l.second + " | " + ca.second + " | " + cb.second + " |\n";
  }
  if (!table.rows.empty()) out += "\nBetter mean per metric in **bold**; std is " + std::string(kStdConvention) + ".\n";
  for (const auto& w : table.warnings) out += "\n> warning: " + w + "\n";
  return out;
}

}  // namespace emomv
