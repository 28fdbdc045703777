#include "twoheads/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "twoheads/error.hpp"
#include "twoheads/featsel.hpp"
#include "twoheads/json_io.hpp"
#include "twoheads/segmentation.hpp"

namespace twoheads {

using nlohmann::json;

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::sota:
      return "sota";
    case Condition::fs:
      return "fs";
    case Condition::twoheads:
      return "twoheads";
  }
  return "unknown";
}

std::optional<Condition> parse_condition(std::string_view name) {
  for (auto c : kAllConditions)
    if (to_string(c) == name) return c;
  return std::nullopt;
}

double combine_weighted(double acc_1h, std::size_t n_1h, double acc_2h, std::size_t n_2h) {
  if (n_1h == 0 || n_2h == 0) throw ArgumentError("combine_weighted: counts must be >= 1");
  if (!(acc_1h >= 0.0 && acc_1h <= 100.0 && acc_2h >= 0.0 && acc_2h <= 100.0))
    throw ArgumentError("combine_weighted: accuracies must lie in [0, 100]");
  if (n_1h == n_2h) return (acc_1h + acc_2h) / 2.0;
  const double a = static_cast<double>(n_1h), b = static_cast<double>(n_2h);
  return (a * acc_1h + b * acc_2h) / (a + b);
}

namespace {

using Clock = std::chrono::steady_clock;

struct PipelineOutcome {
  double accuracy = 0.0;  // percent
  std::size_t n_train = 0, n_val = 0, n_test = 0, n_features = 0;
  double seconds = 0.0;
};

// Split, optionally select on the training rows, fit, score on test.
PipelineOutcome run_pipeline(const FeatureMatrix& features, bool select, ClassifierKind kind, std::size_t k,
                             const Hyperparams& hp, std::uint64_t seed) {
  const auto labels = features.labels();
  const SplitIndices split = split_train_val_test(labels, SplitRatios{}, seed);

  Matrix train = features.values.select_rows(split.train);
  Matrix test = features.values.select_rows(split.test);
  std::vector<int> y_train, y_test;
  for (auto i : split.train) y_train.push_back(labels[i]);
  for (auto i : split.test) y_test.push_back(labels[i]);

  const auto start = Clock::now();
  if (select) {
    const SelectorModel selector = fit_selector(train, y_train, k);
    train = transform(train, selector);
    test = transform(test, selector);
  }
  const TrainedModel model = fit(kind, train, y_train, hp, seed);
  const auto predicted = predict(model, test);
  const auto stop = Clock::now();

  PipelineOutcome out;
  out.accuracy = 100.0 * accuracy(predicted, y_test);
  out.n_train = split.train.size();
  out.n_val = split.val.size();
  out.n_test = split.test.size();
  out.n_features = train.cols();
  out.seconds = std::chrono::duration<double>(stop - start).count();
  return out;
}

}  // namespace

RunResult run_condition(const FeatureMatrix& features, Condition condition, ClassifierKind kind, std::size_t k,
                        const Hyperparams& hp, std::uint64_t seed) {
  RunResult r;
  r.seed = seed;
  if (condition != Condition::twoheads) {
    const auto o = run_pipeline(features, condition == Condition::fs, kind, k, hp, seed);
    r.accuracy = o.accuracy;
    r.n_train = o.n_train;
    r.n_val = o.n_val;
    r.n_test = o.n_test;
    r.n_features = o.n_features;
    r.runtime_s = o.seconds;
    return r;
  }

  const HalfAssignment halves = split_halves(features.rows);
  auto run_half = [&](const std::vector<std::size_t>& rows, const char* name) {
    try {
      return run_pipeline(features.select_rows(rows), true, kind, k, hp, seed);
    } catch (const StratificationError& e) {
      throw StratificationError(std::string("half ") + name + ": " + e.what());
    } catch (const ArgumentError& e) {
      throw ArgumentError(std::string("half ") + name + ": " + e.what());
    }
  };
  const auto first = run_half(halves.first, "1H");
  const auto second = run_half(halves.second, "2H");
  r.acc_1h = first.accuracy;
  r.acc_2h = second.accuracy;
  r.n_test_1h = first.n_test;
  r.n_test_2h = second.n_test;
  r.accuracy = combine_weighted(first.accuracy, first.n_test, second.accuracy, second.n_test);
  r.n_train = first.n_train + second.n_train;
  r.n_val = first.n_val + second.n_val;
  r.n_test = first.n_test + second.n_test;
  r.n_features = first.n_features;
  r.runtime_s = first.seconds + second.seconds;
  return r;
}

const CellReport* RunReport::find(ClassifierKind kind, Condition condition) const {
  for (const auto& c : cells)
    if (c.kind == kind && c.condition == condition) return &c;
  return nullptr;
}

RunReport run_benchmark(const RecordingSet& data, const BenchConfig& config) {
  FilterSpec filter = config.filter;
  filter.sample_rate_hz = data.sample_rate_hz;
  const FeatureMatrix features = extract_features(data, filter, config.threads);
  BenchConfig effective = config;
  effective.filter = filter;
  return run_benchmark(features, dataset_digest(data), effective);
}

RunReport run_benchmark(const FeatureMatrix& features, std::uint64_t digest, const BenchConfig& config) {
  if (config.kinds.empty() || config.conditions.empty())
    throw ArgumentError("run_benchmark: need at least one classifier and one condition");
  if (config.seeds.empty()) throw ArgumentError("run_benchmark: need at least one seed");
  config.hp.validate();

  RunReport report;
  report.k = config.k;
  report.seeds = config.seeds;
  report.hp = config.hp;
  report.filter = config.filter;
  report.dataset_digest = digest;
  report.n_trials = features.n_rows();
  report.n_features = features.n_cols();

  for (auto kind : config.kinds) {
    for (auto condition : config.conditions) {
      CellReport cell;
      cell.kind = kind;
      cell.condition = condition;
      for (auto seed : config.seeds) {
        try {
          cell.runs.push_back(run_condition(features, condition, kind, config.k, config.hp, seed));
        } catch (const Error& e) {
          std::ostringstream os;
          os << "[" << to_string(kind) << " / " << to_string(condition) << " / seed " << seed << "] " << e.what();
          throw Error(os.str());
        }
      }
      const double n = static_cast<double>(cell.runs.size());
      double acc = 0.0, time = 0.0, a1 = 0.0, a2 = 0.0;
      for (const auto& r : cell.runs) {
        acc += r.accuracy;
        time += r.runtime_s;
        if (r.acc_1h) a1 += *r.acc_1h;
        if (r.acc_2h) a2 += *r.acc_2h;
      }
      cell.mean_accuracy = acc / n;
      cell.mean_runtime_s = time / n;
      if (condition == Condition::twoheads) {
        cell.mean_acc_1h = a1 / n;
        cell.mean_acc_2h = a2 / n;
      }
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

std::string format_digest(std::uint64_t digest) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

namespace {

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

json report_to_json(const RunReport& report) {
  json cells = json::array();
  for (const auto& c : report.cells) {
    json runs = json::array();
    for (const auto& r : c.runs) {
      runs.push_back({{"seed", r.seed},
                      {"accuracy", r.accuracy},
                      {"acc_1h", opt(r.acc_1h)},
                      {"acc_2h", opt(r.acc_2h)},
                      {"n_test_1h", opt(r.n_test_1h)},
                      {"n_test_2h", opt(r.n_test_2h)},
                      {"n_train", r.n_train},
                      {"n_val", r.n_val},
                      {"n_test", r.n_test},
                      {"n_features", r.n_features},
                      {"runtime_s", r.runtime_s}});
    }
    cells.push_back({{"classifier", std::string(to_string(c.kind))},
                     {"condition", std::string(to_string(c.condition))},
                     {"mean_accuracy", c.mean_accuracy},
                     {"mean_acc_1h", opt(c.mean_acc_1h)},
                     {"mean_acc_2h", opt(c.mean_acc_2h)},
                     {"mean_runtime_s", c.mean_runtime_s},
                     {"runs", runs}});
  }
  return json{
      {"config",
       {{"k", report.k},
        {"seeds", report.seeds},
        {"hyperparams", hyperparams_to_json(report.hp)},
        {"filter",
         {{"low_hz", report.filter.low_hz},
          {"high_hz", report.filter.high_hz},
          {"n_taps", report.filter.n_taps},
          {"sample_rate_hz", report.filter.sample_rate_hz}}},
        {"dataset_digest", format_digest(report.dataset_digest)},
        {"n_trials", report.n_trials},
        {"n_features", report.n_features},
        {"split_ratios", {0.7, 0.15, 0.15}},
        {"runtime_scope", "selection + fit + predict, wall clock seconds, summed over halves for twoheads"}}},
      {"cells", cells},
  };
}

RunReport report_from_json(const json& j) {
  RunReport report;
  const json& cfg = j.at("config");
  report.k = cfg.at("k").get<std::size_t>();
  report.seeds = cfg.at("seeds").get<std::vector<std::uint64_t>>();
  report.hp = hyperparams_from_json(cfg.at("hyperparams"));
  const json& f = cfg.at("filter");
  report.filter.low_hz = f.at("low_hz").get<double>();
  report.filter.high_hz = f.at("high_hz").get<double>();
  report.filter.n_taps = f.at("n_taps").get<std::size_t>();
  report.filter.sample_rate_hz = f.at("sample_rate_hz").get<double>();
  report.dataset_digest = std::stoull(cfg.at("dataset_digest").get<std::string>(), nullptr, 16);
  report.n_trials = cfg.at("n_trials").get<std::size_t>();
  report.n_features = cfg.at("n_features").get<std::size_t>();
  for (const auto& c : j.at("cells")) {
    CellReport cell;
    const auto kind = parse_classifier(c.at("classifier").get<std::string>());
    const auto condition = parse_condition(c.at("condition").get<std::string>());
    if (!kind || !condition) throw FormatError("report json: unknown classifier or condition");
    cell.kind = *kind;
    cell.condition = *condition;
    cell.mean_accuracy = c.at("mean_accuracy").get<double>();
    cell.mean_acc_1h = get_opt<double>(c, "mean_acc_1h");
    cell.mean_acc_2h = get_opt<double>(c, "mean_acc_2h");
    cell.mean_runtime_s = c.at("mean_runtime_s").get<double>();
    for (const auto& r : c.at("runs")) {
      RunResult run;
      run.seed = r.at("seed").get<std::uint64_t>();
      run.accuracy = r.at("accuracy").get<double>();
      run.acc_1h = get_opt<double>(r, "acc_1h");
      run.acc_2h = get_opt<double>(r, "acc_2h");
      run.n_test_1h = get_opt<std::size_t>(r, "n_test_1h");
      run.n_test_2h = get_opt<std::size_t>(r, "n_test_2h");
      run.n_train = r.at("n_train").get<std::size_t>();
      run.n_val = r.at("n_val").get<std::size_t>();
      run.n_test = r.at("n_test").get<std::size_t>();
      run.n_features = r.at("n_features").get<std::size_t>();
      run.runtime_s = r.at("runtime_s").get<double>();
      cell.runs.push_back(run);
    }
    report.cells.push_back(std::move(cell));
  }
  return report;
}

void write_report_csv(const RunReport& report, std::ostream& os) {
  os << "classifier,condition,mean_acc,acc_1h,acc_2h,runtime_s\n";
  char buf[64];
  for (const auto& c : report.cells) {
    os << to_string(c.kind) << ',' << to_string(c.condition) << ',';
    std::snprintf(buf, sizeof buf, "%.4f", c.mean_accuracy);
    os << buf << ',';
    if (c.mean_acc_1h) {
      std::snprintf(buf, sizeof buf, "%.4f", *c.mean_acc_1h);
      os << buf;
    }
    os << ',';
    if (c.mean_acc_2h) {
      std::snprintf(buf, sizeof buf, "%.4f", *c.mean_acc_2h);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.6f\n", c.mean_runtime_s);
    os << buf;
  }
}

void emit_report(const RunReport& report, const std::filesystem::path& path, ReportFormat format) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  if (format == ReportFormat::json)
    os << report_to_json(report).dump(2) << '\n';
  else
    write_report_csv(report, os);
  os.flush();
  if (!os) throw IoError("write failed: " + path.string());
}

std::string format_percent(double value) {
  const double rounded = std::round(value * 10.0) / 10.0;  // std::round is half away from zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", rounded);
  return buf;
}

std::string summary_table(const RunReport& report) {
  std::vector<ClassifierKind> kinds;
  std::vector<Condition> conditions;
  for (const auto& c : report.cells) {
    if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end()) kinds.push_back(c.kind);
    if (std::find(conditions.begin(), conditions.end(), c.condition) == conditions.end())
      conditions.push_back(c.condition);
  }
  std::sort(conditions.begin(), conditions.end());

  std::ostringstream os;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-20s", "classifier");
  os << buf;
  for (auto cond : conditions) {
    if (cond == Condition::sota) os << "    SOTA";
    if (cond == Condition::fs) os << "      FS";
    if (cond == Condition::twoheads) os << "      1H      2H   1H+2H";
  }
  os << '\n';
  for (auto kind : kinds) {
    std::snprintf(buf, sizeof buf, "%-20s", std::string(to_string(kind)).c_str());
    os << buf;
    for (auto cond : conditions) {
      const CellReport* cell = report.find(kind, cond);
      auto col = [&](std::optional<double> v) {
        std::snprintf(buf, sizeof buf, "%8s", v ? format_percent(*v).c_str() : "-");
        os << buf;
      };
      if (cond == Condition::twoheads) {
        col(cell ? cell->mean_acc_1h : std::nullopt);
        col(cell ? cell->mean_acc_2h : std::nullopt);
      }
      col(cell ? std::optional<double>(cell->mean_accuracy) : std::nullopt);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace twoheads
