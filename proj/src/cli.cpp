#include "twoheads/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "twoheads/bench.hpp"
#include "twoheads/dataio.hpp"
#include "twoheads/dsp.hpp"
#include "twoheads/error.hpp"
#include "twoheads/featsel.hpp"
#include "twoheads/segmentation.hpp"

namespace twoheads {

namespace {

// Usage problems detected after CLI11 has parsed the flags.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class Logger {
 public:
  Logger(std::ostream& err, bool verbose) : err_(err), verbose_(verbose) {}
  void operator()(const std::string& msg) const {
    if (!verbose_) return;
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    localtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%H:%M:%S", &tm);
    err_ << "[" << stamp << "] " << msg << '\n';
  }

 private:
  std::ostream& err_;
  bool verbose_;
};

unsigned threads_from_env() {
  const char* raw = std::getenv("TWOHEADS_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  char* end = nullptr;
  const unsigned long v = std::strtoul(raw, &end, 10);
  if (*end != '\0' || v > 1024) throw UsageError(std::string("TWOHEADS_THREADS must be an integer in [0, 1024], got ") + raw);
  return static_cast<unsigned>(v);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string classifier_names() {
  std::string names;
  for (auto k : kAllClassifiers) {
    if (!names.empty()) names += ", ";
    names += to_string(k);
  }
  return names + " (aliases: gnb, svm, rbf, ada, rf, gb, xgb)";
}

std::vector<std::size_t> partition_rows(const RecordingSet& set, const std::string& half) {
  std::vector<std::size_t> rows;
  if (half == "all") {
    for (std::size_t i = 0; i < set.trials.size(); ++i) rows.push_back(i);
    return rows;
  }
  const HalfAssignment halves = split_halves(set);
  return half == "1h" ? halves.first : halves.second;
}

FilterSpec filter_for(const RecordingSet& set) {
  FilterSpec spec;
  spec.sample_rate_hz = set.sample_rate_hz;
  return spec;
}

struct GenerateArgs {
  GeneratorConfig cfg;
  std::string out;
};

struct RunArgs {
  std::string data;
  std::string classifiers = "all";
  std::string conditions = "sota,fs,twoheads";
  std::size_t k = 50;
  std::size_t runs = 5;
  std::string report;
  std::string format = "json";
};

struct InspectArgs {
  std::string data;
  std::string half = "all";
  std::size_t top = 10;
};

struct ExportArgs {
  std::string data;
  std::string out;
  std::string half = "all";
};

// The active sets follow the channel count: set_a starts at 0, set_b at the
// midpoint, up to 8 channels each. For 129 channels this gives 0-7 and 64-71.
void place_active_sets(GeneratorConfig& cfg) {
  const std::uint32_t half = cfg.n_channels / 2;
  const std::uint32_t m = std::min<std::uint32_t>(8, half);
  cfg.set_a.clear();
  cfg.set_b.clear();
  for (std::uint32_t i = 0; i < m; ++i) {
    cfg.set_a.push_back(i);
    cfg.set_b.push_back(half + i);
  }
}

int cmd_generate(const GenerateArgs& a, std::ostream& out, const Logger& log) {
  log("generating " + std::to_string(a.cfg.n_subjects) + " x " + std::to_string(a.cfg.trials_per_subject) +
      " trials, seed " + std::to_string(a.cfg.seed));
  const RecordingSet set = generate_synthetic(a.cfg);
  write_container(set, a.out);
  out << "generated " << set.n_trials() << " trials, " << set.n_subjects() << " subjects -> " << a.out << '\n';
  return kExitOk;
}

int cmd_run(const RunArgs& a, std::uint64_t seed, unsigned threads, std::ostream& out, const Logger& log) {
  BenchConfig cfg;
  cfg.threads = threads;
  cfg.k = a.k;
  cfg.seeds.clear();
  for (std::size_t r = 0; r < a.runs; ++r) cfg.seeds.push_back(seed + r);
  cfg.kinds.clear();
  if (a.classifiers == "all") {
    cfg.kinds.assign(kAllClassifiers.begin(), kAllClassifiers.end());
  } else {
    for (const auto& name : split_list(a.classifiers)) {
      const auto kind = parse_classifier(name);
      if (!kind) throw UsageError("unknown classifier '" + name + "'; valid names: " + classifier_names());
      cfg.kinds.push_back(*kind);
    }
  }
  cfg.conditions.clear();
  for (const auto& name : split_list(a.conditions)) {
    const auto cond = parse_condition(name);
    if (!cond) throw UsageError("unknown condition '" + name + "'; valid names: sota, fs, twoheads");
    cfg.conditions.push_back(*cond);
  }
  if (cfg.kinds.empty() || cfg.conditions.empty()) throw UsageError("need at least one classifier and one condition");

  log("reading " + a.data);
  const RecordingSet set = read_container(a.data);
  log("extracting features (" + std::to_string(set.n_trials()) + " trials)");
  cfg.filter = filter_for(set);
  const FeatureMatrix features = extract_features(set, cfg.filter, threads);
  log("running " + std::to_string(cfg.kinds.size() * cfg.conditions.size()) + " cells x " +
      std::to_string(cfg.seeds.size()) + " seeds");
  const RunReport report = run_benchmark(features, dataset_digest(set), cfg);
  if (!a.report.empty()) {
    emit_report(report, a.report, a.format == "csv" ? ReportFormat::csv : ReportFormat::json);
    log("report written to " + a.report);
  }
  out << summary_table(report);
  return kExitOk;
}

int cmd_inspect(const InspectArgs& a, unsigned threads, std::ostream& out, const Logger& log) {
  const RecordingSet set = read_container(a.data);
  const auto rows = partition_rows(set, a.half);
  log("scoring " + std::to_string(rows.size()) + " trials (" + a.half + ")");
  const FeatureMatrix features = extract_features(set, rows, filter_for(set), threads);
  const SelectorModel model = fit_selector(features.values, features.labels(), a.top);
  const auto order = rank_features(model.scores);
  const std::size_t n = std::min(a.top, order.size());
  out << "rank\tfeature\tF\n";
  char buf[64];
  for (std::size_t r = 0; r < n; ++r) {
    const double f = model.scores[order[r]];
    if (std::isinf(f))
      std::snprintf(buf, sizeof buf, "inf");
    else
      std::snprintf(buf, sizeof buf, "%.6g", f);
    out << (r + 1) << '\t' << features.names[order[r]].label() << '\t' << buf << '\n';
  }
  return kExitOk;
}

int cmd_export(const ExportArgs& a, unsigned threads, std::ostream& out, const Logger& log) {
  const RecordingSet set = read_container(a.data);
  const auto rows = partition_rows(set, a.half);
  const FeatureMatrix features = extract_features(set, rows, filter_for(set), threads);
  std::ofstream os(a.out, std::ios::trunc | std::ios::binary);
  if (!os) throw IoError("cannot open " + a.out + " for writing");
  write_features_csv(features, os);
  os.flush();
  if (!os) throw IoError("write failed: " + a.out);
  log("wrote " + std::to_string(features.n_rows()) + " rows");
  out << "exported " << features.n_rows() << " rows, " << features.n_cols() << " features -> " << a.out << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-heads EEG benchmark: synthetic data, alpha-band features, classifier comparison"};
  app.name("twoheads");
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  bool verbose = false;
  app.add_option("--seed", seed, "RNG seed (generate: 42, run: first split seed, 0)");
  app.add_flag("-v,--verbose", verbose, "Progress messages on stderr");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic EEGB recording")->fallthrough();
  generate->add_option("--subjects", gen.cfg.n_subjects, "Number of subjects")->capture_default_str();
  generate->add_option("--trials", gen.cfg.trials_per_subject, "Trials per subject")->capture_default_str();
  generate->add_option("--channels", gen.cfg.n_channels, "Channels per trial")->capture_default_str();
  generate->add_option("--samples", gen.cfg.n_samples, "Samples per channel")->capture_default_str();
  generate->add_option("--contrast", gen.cfg.contrast, "Class amplitude contrast")->capture_default_str();
  generate->add_option("--decay", gen.cfg.decay, "Contrast decay over the session")->capture_default_str();
  generate->add_option("--out", gen.out, "Output path")->required();

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Benchmark classifiers x conditions")->fallthrough();
  run_cmd->add_option("--data", run.data, "EEGB input")->required();
  run_cmd->add_option("--classifiers", run.classifiers, "Comma list or 'all'")->capture_default_str();
  run_cmd->add_option("--conditions", run.conditions, "Comma list of sota, fs, twoheads")->capture_default_str();
  run_cmd->add_option("--k", run.k, "Features kept by selection")->capture_default_str()->check(CLI::PositiveNumber);
  run_cmd->add_option("--runs", run.runs, "Seeds per cell")->capture_default_str()->check(CLI::PositiveNumber);
  run_cmd->add_option("--report", run.report, "Report output path");
  run_cmd->add_option("--format", run.format, "Report format")
      ->capture_default_str()
      ->check(CLI::IsMember({"json", "csv"}));

  InspectArgs insp;
  auto* inspect = app.add_subcommand("inspect", "Top F-ranked features of a partition")->fallthrough();
  inspect->add_option("--data", insp.data, "EEGB input")->required();
  inspect->add_option("--half", insp.half, "Partition")->capture_default_str()->check(CLI::IsMember({"all", "1h", "2h"}));
  inspect->add_option("--top", insp.top, "Features to list")->capture_default_str()->check(CLI::PositiveNumber);

  ExportArgs exp;
  auto* export_cmd = app.add_subcommand("export-features", "Write the feature matrix as CSV")->fallthrough();
  export_cmd->add_option("--data", exp.data, "EEGB input")->required();
  export_cmd->add_option("--out", exp.out, "CSV output path")->required();
  export_cmd->add_option("--half", exp.half, "Partition")->capture_default_str()->check(CLI::IsMember({"all", "1h", "2h"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    err << "run with --help for usage\n";
    return kExitUsage;
  }

  const Logger log(err, verbose);
  try {
    const unsigned threads = threads_from_env();
    if (generate->parsed()) {
      gen.cfg.seed = seed.value_or(42);
      place_active_sets(gen.cfg);
      try {
        gen.cfg.validate();
      } catch (const ConfigError& e) {
        throw UsageError(e.what());
      }
      return cmd_generate(gen, out, log);
    }
    if (run_cmd->parsed()) return cmd_run(run, seed.value_or(0), threads, out, log);
    if (inspect->parsed()) return cmd_inspect(insp, threads, out, log);
    if (export_cmd->parsed()) return cmd_export(exp, threads, out, log);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace twoheads
