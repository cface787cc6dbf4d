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

#include "emomv/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

namespace emomv {

namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ModelError*>(&e)) return kExitModel;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const BandError*>(&e)) return kExitConfig;
  return kExitInput;
}

// ---------------------------------------------------------------------------
// RunConfig

void RunConfig::validate() const {
  const auto positive = [](double v, const char* key) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(key) + " must be a positive number");
  };
  positive(eeg.fs_hz, "eeg.fs_hz");
  positive(eeg.window_s, "eeg.window_s");
  positive(eeg.hop_s, "eeg.hop_s");
  positive(eeg.event_k, "eeg.event_k");
  for (const auto& b : eeg.bands) {
    if (!(b.lo_hz > 0.0) || !(b.lo_hz < b.hi_hz) || !std::isfinite(b.hi_hz)) {
      throw ConfigError("eeg.band." + std::string(to_string(b.name)) + " needs 0 < lo < hi");
    }
  }
  if (parallelism < 0) throw ConfigError("parallelism must be a positive integer or 'auto'");
}

int RunConfig::resolved_parallelism() const {
  if (parallelism > 0) return parallelism;
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view text, const std::string& key) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(key + ": '" + std::string(text) + "' is not a number");
  }
  return v;
}

int parse_parallelism(std::string_view text) {
  text = trim(text);
  if (text == "auto") return 0;
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || v < 1) {
    throw ConfigError("parallelism: '" + std::string(text) + "' is not a positive integer or 'auto'");
  }
  return v;
}

// Calls fn(key, value, line_no) for every non-comment line.
template <typename Fn>
void for_each_entry(std::istream& in, Fn&& fn) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    fn(std::string(trim(text.substr(0, eq))), trim(text.substr(eq + 1)), line_no);
  }
}

void set_band(std::vector<FrequencyBand>& bands, BandName name, std::string_view value, const std::string& key) {
  const auto comma = value.find(',');
  if (comma == std::string_view::npos) throw ConfigError(key + ": expected 'lo,hi'");
  const double lo = parse_double(value.substr(0, comma), key);
  const double hi = parse_double(value.substr(comma + 1), key);
  for (auto& b : bands) {
    if (b.name == name) {
      b.lo_hz = lo;
      b.hi_hz = hi;
      return;
    }
  }
  bands.push_back({name, lo, hi});
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

RunConfig parse_run_config(std::istream& in, RunConfig base, const fs::path& relative_to) {
  for_each_entry(in, [&](const std::string& key, std::string_view value, int line_no) {
    if (key == "brisque_model") {
      fs::path p{std::string(value)};
      base.brisque_model_path = (p.is_relative() && !relative_to.empty()) ? relative_to / p : p;
    } else if (key == "output_format") {
      base.output_format = parse_format(value);
    } else if (key == "parallelism") {
      base.parallelism = parse_parallelism(value);
    } else if (key == "eeg.fs_hz") {
      base.eeg.fs_hz = parse_double(value, key);
    } else if (key == "eeg.window_s") {
      base.eeg.window_s = parse_double(value, key);
    } else if (key == "eeg.hop_s") {
      base.eeg.hop_s = parse_double(value, key);
    } else if (key == "eeg.event_k") {
      base.eeg.event_k = parse_double(value, key);
    } else if (key.starts_with("eeg.band.")) {
      set_band(base.eeg.bands, parse_band_name(key.substr(9)), value, key);
    } else if (key.starts_with("direction.") && key.size() > 10) {
      base.directions[key.substr(10)] = parse_direction(value);
    } else {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  });
  base.validate();
  return base;
}

RunConfig load_run_config(const fs::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return parse_run_config(in, std::move(base), path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string serialize_run_config(const RunConfig& config) {
  std::string out;
  if (!config.brisque_model_path.empty()) out += "brisque_model = " + config.brisque_model_path.string() + "\n";
  out += "output_format = " + std::string(to_string(config.output_format)) + "\n";
  out += "parallelism = " + (config.parallelism == 0 ? std::string("auto") : std::to_string(config.parallelism)) + "\n";
  out += "eeg.fs_hz = " + format_number(config.eeg.fs_hz) + "\n";
  out += "eeg.window_s = " + format_number(config.eeg.window_s) + "\n";
  out += "eeg.hop_s = " + format_number(config.eeg.hop_s) + "\n";
  out += "eeg.event_k = " + format_number(config.eeg.event_k) + "\n";
  for (const auto& b : config.eeg.bands) {
    out += "eeg.band." + std::string(to_string(b.name)) + " = " + format_number(b.lo_hz) + "," +
           format_number(b.hi_hz) + "\n";
  }
  for (const auto& [metric, dir] : config.directions) {
    out += "direction." + metric + " = " + std::string(to_string(dir)) + "\n";
  }
  return out;
}

void merge_directions(std::istream& in, DirectionMap& directions) {
  for_each_entry(in, [&](const std::string& key, std::string_view value, int) {
    const std::string metric = key.starts_with("direction.") ? key.substr(10) : key;
    if (metric.empty()) throw ConfigError("direction entry without a metric name");
    directions[metric] = parse_direction(value);
  });
}

// ---------------------------------------------------------------------------
// iqa

namespace {

bool is_image_name(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

// Runs task(i) for i in [0, count) on up to `workers` threads.
template <typename Task>
void parallel_for(std::size_t count, int workers, Task&& task) {
  const auto n = static_cast<std::size_t>(std::max(1, workers));
  if (n == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(std::min(n, count));
  for (std::size_t w = 0; w < std::min(n, count); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
  }
}

std::string default_label(const fs::path& p) {
  const auto name = fs::weakly_canonical(p).filename().string();
  return name.empty() ? p.string() : name;
}

MetricEntry entry(std::string name, const MetricStats& stats) {
  MetricEntry e;
  e.name = std::move(name);
  e.stats = stats;
  return e;
}

}  // namespace

IqaRun cmd_iqa(const fs::path& dir, const RunConfig& config, std::ostream& log, const std::string& label) {
  config.validate();
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw EmptyInput("not a readable directory: " + dir.string());
  if (config.brisque_model_path.empty()) throw ModelError("no BRISQUE model configured (use --model)");
  const BrisqueModel model = load_brisque_model(config.brisque_model_path);

  std::vector<fs::path> files;
  for (fs::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) {
    if (it->is_regular_file(ec) && is_image_name(it->path())) files.push_back(it->path());
  }
  if (ec) throw EmptyInput("cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw EmptyInput("no .png/.jpg/.jpeg files in " + dir.string());

  std::vector<std::optional<IqaRecord>> results(files.size());
  std::vector<std::string> failures(files.size());
  parallel_for(files.size(), config.resolved_parallelism(), [&](std::size_t i) {
    try {
      results[i] = iqa_all(read_image_file(files[i]), model);
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });

  IqaRun run;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!results[i]) {
      log << "warning: skipping " << files[i].filename().string() << ": " << failures[i] << "\n";
      ++run.stats.skipped_files;
      continue;
    }
    run.ids.push_back(files[i].filename().string());
    run.records.push_back(*results[i]);
  }
  if (run.records.empty()) throw EmptyInput("no decodable images in " + dir.string());

  std::vector<double> sharpness, contrast, colorfulness;
  std::vector<std::optional<double>> brisque;
  for (const auto& r : run.records) {
    sharpness.push_back(r.sharpness);
    contrast.push_back(r.contrast);
    colorfulness.push_back(r.colorfulness);
    brisque.push_back(r.brisque);
  }
  run.stats.kind = "iqa";
  run.stats.label = label.empty() ? default_label(dir) : label;
  run.stats.metrics.push_back(entry("sharpness", aggregate(sharpness)));
  run.stats.metrics.push_back(entry("contrast", aggregate(contrast)));
  run.stats.metrics.push_back(entry("colorfulness", aggregate(colorfulness)));
  const auto scored = std::count_if(brisque.begin(), brisque.end(), [](const auto& v) { return v.has_value(); });
  if (scored == 0) {
    log << "warning: every image is degenerate for BRISQUE; the brisque row is empty\n";
    MetricStats none;
    none.skipped = static_cast<std::int64_t>(brisque.size());
    run.stats.metrics.push_back(entry("brisque", none));
  } else {
    if (scored < static_cast<std::ptrdiff_t>(brisque.size())) {
      log << "warning: " << (brisque.size() - scored) << " degenerate image(s) excluded from BRISQUE\n";
    }
    run.stats.metrics.push_back(entry("brisque", aggregate(brisque)));
  }
  return run;
}

// ---------------------------------------------------------------------------
// eeg

StatsSet cmd_eeg(const fs::path& file, const RunConfig& config, std::ostream& log, std::optional<double> fs_flag,
                 const std::string& label) {
  config.validate();
  const double csv_fs = fs_flag.value_or(config.eeg.fs_hz);
  if (!(csv_fs > 0.0)) throw ConfigError("--fs must be positive");
  std::error_code ec;
  if (!fs::is_regular_file(file, ec)) throw ParseError("cannot read recording " + file.string());
  const EegRecording recording = read_eeg_file(file, csv_fs);
  if (fs_flag && is_eeg_binary_file(file) && *fs_flag != recording.sample_rate_hz()) {
    log << "warning: " << file.filename().string() << " declares " << recording.sample_rate_hz()
        << " Hz; ignoring --fs " << *fs_flag << "\n";
  }
  const auto summaries =
      summarize_bands(recording, config.eeg.bands, config.eeg.window_s, config.eeg.hop_s, config.eeg.event_k);
  StatsSet stats;
  stats.kind = "eeg";
  stats.label = label.empty() ? file.stem().string() : label;
  for (const auto& s : summaries) {
    MetricEntry e = entry(std::string(to_string(s.band.name)),
                          aggregate(std::span<const double>(s.series.data(), static_cast<std::size_t>(s.series.size()))));
    e.events = s.event_count;
    stats.metrics.push_back(std::move(e));
  }
  return stats;
}

// ---------------------------------------------------------------------------
// compare / ingest-scores

StatsSet read_stats_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  try {
    if (first != std::string::npos && text[first] == '{') return parse_stats_json(text);
    if (text.compare(first == std::string::npos ? 0 : first, 7, "metric,") == 0) {
      StatsSet s = parse_stats_csv(text);
      s.label = path.stem().string();
      return s;
    }
  } catch (const Error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  throw SchemaError(path.string() + ": not a JSON or CSV statistics document (markdown output cannot be compared)");
}

ComparisonTable cmd_compare(const fs::path& a, const fs::path& b, const RunConfig& config) {
  const StatsSet sa = read_stats_file(a);
  const StatsSet sb = read_stats_file(b);
  try {
    return compare(sa, sb, config.directions);
  } catch (const SchemaError& e) {
    throw SchemaError(std::string(e.what()) + " (" + a.string() + " vs " + b.string() + ")");
  }
}

StatsSet cmd_ingest_scores(const fs::path& file, const std::string& metric, const std::string& label) {
  const ScoreFile scores = read_score_file(file.string());
  if (scores.empty()) throw EmptyInput(file.string() + ": score file has no rows");
  std::vector<double> values;
  values.reserve(scores.size());
  for (const auto& row : scores) values.push_back(row.score);
  MetricEntry e = entry(metric, aggregate(values));
  e.variance = aggregate_scores(scores).variance;
  StatsSet stats;
  stats.kind = "scores";
  stats.label = label.empty() ? file.stem().string() : label;
  stats.metrics.push_back(std::move(e));
  return stats;
}

// ---------------------------------------------------------------------------
// run_cli

namespace {

#ifdef EMOMV_DEFAULT_MODEL_PATH
constexpr const char* kDefaultModelPath = EMOMV_DEFAULT_MODEL_PATH;
#else
constexpr const char* kDefaultModelPath = "";
#endif

void write_output(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
  if (!file || !(file << text) || !file.flush()) throw ParseError("cannot write " + out_path);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Image quality, EEG band and comparison reports", "emomv-eval"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "Flat key=value config file (default: $EMOMV_EVAL_CONFIG)");

  std::string out_path, format_text, label;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "Write the result here instead of stdout");
    sub->add_option("--format", format_text, "json, csv or markdown");
    sub->add_option("--label", label, "Column label for this result");
  };

  auto* iqa = app.add_subcommand("iqa", "Score every image in a directory");
  std::string iqa_dir, model_path, records_path, parallelism_text;
  iqa->add_option("dir", iqa_dir, "Image directory")->required();
  iqa->add_option("--model", model_path, "BRISQUE model JSON");
  iqa->add_option("--parallelism", parallelism_text, "Worker threads or 'auto'");
  iqa->add_option("--records", records_path, "Also write per-image records (CSV)");
  add_common(iqa);

  auto* eeg = app.add_subcommand("eeg", "Band means and event counts of one recording");
  std::string eeg_file;
  std::optional<double> fs_flag;
  eeg->add_option("file", eeg_file, "Recording (CSV or EEG1 binary)")->required();
  eeg->add_option("--fs", fs_flag, "Sample rate of CSV input in Hz");
  add_common(eeg);

  auto* cmp = app.add_subcommand("compare", "Compare two statistics files");
  std::string cmp_a, cmp_b, directions_path;
  cmp->add_option("A", cmp_a, "Statistics file A")->required();
  cmp->add_option("B", cmp_b, "Statistics file B")->required();
  cmp->add_option("--directions", directions_path, "metric = higher|lower lines");
  add_common(cmp);

  auto* ingest = app.add_subcommand("ingest-scores", "Mean and variance of an id,score CSV");
  std::string score_file, metric = "vila";
  ingest->add_option("csv", score_file, "Score file")->required();
  ingest->add_option("--metric", metric, "Metric name for the scores")->capture_default_str();
  add_common(ingest);

  std::vector<const char*> argv;
  argv.push_back("emomv-eval");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "emomv-eval: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    RunConfig config;
    config.brisque_model_path = kDefaultModelPath;
    if (config_path.empty()) {
      if (const char* env = std::getenv("EMOMV_EVAL_CONFIG"); env && *env) config_path = env;
    }
    if (!config_path.empty()) config = load_run_config(config_path, std::move(config));
    if (!model_path.empty()) config.brisque_model_path = model_path;
    if (!format_text.empty()) config.output_format = parse_format(format_text);
    if (!parallelism_text.empty()) config.parallelism = parse_parallelism(parallelism_text);

    std::string text;
    if (iqa->parsed()) {
      const IqaRun run = cmd_iqa(iqa_dir, config, err, label);
      if (!records_path.empty()) {
        std::string csv = "id,sharpness,contrast,colorfulness,brisque\n";
        for (std::size_t i = 0; i < run.records.size(); ++i) {
          const auto& r = run.records[i];
          csv += run.ids[i] + "," + format_number(r.sharpness) + "," + format_number(r.contrast) + "," +
                 format_number(r.colorfulness) + "," + (r.brisque ? format_number(*r.brisque) : std::string()) + "\n";
        }
        write_output(csv, records_path, out);
      }
      err << "scored " << run.records.size() << " image(s), skipped " << run.stats.skipped_files << "\n";
      text = render(run.stats, config.output_format);
    } else if (eeg->parsed()) {
      text = render(cmd_eeg(eeg_file, config, err, fs_flag, label), config.output_format);
    } else if (cmp->parsed()) {
      if (!directions_path.empty()) {
        std::ifstream in(directions_path);
        if (!in) throw ConfigError("cannot open directions file " + directions_path);
        merge_directions(in, config.directions);
      }
      ComparisonTable table = cmd_compare(cmp_a, cmp_b, config);
      for (const auto& w : table.warnings) err << "warning: " << w << "\n";
      text = render(table, config.output_format);
    } else {
      text = render(cmd_ingest_scores(score_file, metric, label), config.output_format);
    }
    write_output(text, out_path, out);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "emomv-eval: error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace emomv
