#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "twoheads/classifiers.hpp"
#include "twoheads/dataio.hpp"
#include "twoheads/dsp.hpp"

namespace twoheads {

// sota: pooled rows, all features. fs: pooled rows, ANOVA-F top-k.
// twoheads: 1H and 2H run the fs pipeline independently.
enum class Condition { sota, fs, twoheads };

inline constexpr std::array<Condition, 3> kAllConditions = {Condition::sota, Condition::fs, Condition::twoheads};

std::string_view to_string(Condition c);
std::optional<Condition> parse_condition(std::string_view name);

// (n_1h * acc_1h + n_2h * acc_2h) / (n_1h + n_2h), accuracies in percent.
// Throws ArgumentError for zero counts or accuracies outside [0, 100].
double combine_weighted(double acc_1h, std::size_t n_1h, double acc_2h, std::size_t n_2h);

struct RunResult {
  std::uint64_t seed = 0;
  double accuracy = 0.0;  // percent; combined for twoheads
  std::optional<double> acc_1h;
  std::optional<double> acc_2h;
  std::optional<std::size_t> n_test_1h;
  std::optional<std::size_t> n_test_2h;
  std::size_t n_train = 0;  // summed over halves for twoheads
  std::size_t n_val = 0;
  std::size_t n_test = 0;
  std::size_t n_features = 0;  // columns the classifier saw
  double runtime_s = 0.0;      // selection + fit + predict

  bool operator==(const RunResult&) const = default;
};

// One seeded run. The split seed and classifier seed are both `seed`.
RunResult run_condition(const FeatureMatrix& features, Condition condition, ClassifierKind kind, std::size_t k,
                        const Hyperparams& hp, std::uint64_t seed);

struct CellReport {
  ClassifierKind kind = ClassifierKind::gaussian_nb;
  Condition condition = Condition::sota;
  double mean_accuracy = 0.0;
  std::optional<double> mean_acc_1h;
  std::optional<double> mean_acc_2h;
  double mean_runtime_s = 0.0;
  std::vector<RunResult> runs;

  bool operator==(const CellReport&) const = default;
};

struct BenchConfig {
  std::vector<ClassifierKind> kinds{kAllClassifiers.begin(), kAllClassifiers.end()};
  std::vector<Condition> conditions{kAllConditions.begin(), kAllConditions.end()};
  std::size_t k = 50;
  Hyperparams hp;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  FilterSpec filter;
  unsigned threads = 0;  // feature extraction only
};

struct RunReport {
  std::size_t k = 0;
  std::vector<std::uint64_t> seeds;
  Hyperparams hp;
  FilterSpec filter;
  std::uint64_t dataset_digest = 0;
  std::size_t n_trials = 0;
  std::size_t n_features = 0;
  std::vector<CellReport> cells;

  const CellReport* find(ClassifierKind kind, Condition condition) const;
  bool operator==(const RunReport&) const = default;
};

// Extracts features once (filter rate taken from the recording), then runs
// every kind x condition x seed in that order.
RunReport run_benchmark(const RecordingSet& data, const BenchConfig& config);

// Same, on precomputed features; `digest` is echoed into the report.
RunReport run_benchmark(const FeatureMatrix& features, std::uint64_t digest, const BenchConfig& config);

nlohmann::json report_to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);

// One row per cell: classifier,condition,mean_acc,acc_1h,acc_2h,runtime_s.
void write_report_csv(const RunReport& report, std::ostream& os);

enum class ReportFormat { json, csv };
void emit_report(const RunReport& report, const std::filesystem::path& path, ReportFormat format);

// Rounds half away from zero to one decimal.
std::string format_percent(double value);

// Classifier rows by SOTA / FS / 1H / 2H / 1H+2H columns (those present).
std::string summary_table(const RunReport& report);

std::string format_digest(std::uint64_t digest);

}  // namespace twoheads
