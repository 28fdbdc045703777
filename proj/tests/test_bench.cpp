#include <doctest.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "support.hpp"
#include "twoheads/bench.hpp"
#include "twoheads/error.hpp"
#include "twoheads/featsel.hpp"
#include "twoheads/segmentation.hpp"

using namespace twoheads;

namespace {

struct ReferenceRow {
  const char* name;
  double h1, h2, combined;
};

// Reference 1H, 2H and 1H+2H accuracies (%), rounded to one decimal.
constexpr std::array<ReferenceRow, 8> kReferenceRows = {{
    {"Gaussian NB", 94.6, 91.4, 93.0},
    {"LinearSVC", 96.8, 88.7, 92.7},
    {"KNN", 96.9, 95.7, 96.3},
    {"RBF SVC", 97.5, 95.9, 96.7},
    {"AdaBoost", 97.7, 95.2, 96.4},
    {"Random Forest", 97.9, 96.4, 97.1},
    {"Gradient Boost", 98.2, 96.9, 97.5},
    {"XGBoost", 98.6, 97.6, 98.1},
}};

// Small nonstationary recording whose features are cached across tests.
const FeatureMatrix& small_features() {
  static const FeatureMatrix fm = [] {
    GeneratorConfig cfg;
    cfg.n_subjects = 6;
    cfg.trials_per_subject = 30;
    cfg.n_channels = 12;
    cfg.set_a = {0, 1, 2};
    cfg.set_b = {6, 7, 8};
    cfg.contrast = 0.15;
    cfg.seed = 7;
    return extract_features(generate_synthetic(cfg), FilterSpec{});
  }();
  return fm;
}

void strip_runtimes(nlohmann::json& j) {
  for (auto& cell : j["cells"]) {
    cell.erase("mean_runtime_s");
    for (auto& run : cell["runs"]) run.erase("runtime_s");
  }
}

}  // namespace

TEST_CASE("combine rule reproduces the reference 1H+2H column") {
  for (const auto& row : kReferenceRows) {
    CAPTURE(row.name);
    const double c = combine_weighted(row.h1, 100, row.h2, 100);
    CHECK(std::abs(c - row.combined) <= 0.05 + 1e-9);
  }
  CHECK(combine_weighted(94.6, 270, 91.4, 270) == doctest::Approx(93.0).epsilon(1e-12));
  CHECK(combine_weighted(98.6, 3, 97.6, 3) == doctest::Approx(98.1).epsilon(1e-12));
}

TEST_CASE("combine rule properties") {
  CHECK(combine_weighted(88.25, 10, 88.25, 31) == 88.25);
  Rng rng(1);
  for (int rep = 0; rep < 200; ++rep) {
    const double a = 100.0 * rng.uniform(), b = 100.0 * rng.uniform();
    const std::size_t n = 1 + rng.below(500), m = 1 + rng.below(500);
    const double c = combine_weighted(a, n, b, m);
    CHECK(c >= std::min(a, b));
    CHECK(c <= std::max(a, b));
    CHECK(combine_weighted(a, n, b, n) == (a + b) / 2.0);
  }
  CHECK(combine_weighted(50, 1, 100, 3) == 87.5);
  CHECK_THROWS_AS(combine_weighted(50, 0, 60, 3), ArgumentError);
  CHECK_THROWS_AS(combine_weighted(50, 3, 60, 0), ArgumentError);
  CHECK_THROWS_AS(combine_weighted(150, 3, 60, 3), ArgumentError);
}

TEST_CASE("condition names") {
  CHECK(parse_condition("twoheads") == Condition::twoheads);
  CHECK(to_string(Condition::fs) == "fs");
  CHECK_FALSE(parse_condition("1h").has_value());
}

TEST_CASE("twoheads combines its own halves") {
  const auto& fm = small_features();
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto r = run_condition(fm, Condition::twoheads, ClassifierKind::gaussian_nb, 6, Hyperparams{}, seed);
    REQUIRE(r.acc_1h.has_value());
    REQUIRE(r.acc_2h.has_value());
    CHECK(r.accuracy == combine_weighted(*r.acc_1h, *r.n_test_1h, *r.acc_2h, *r.n_test_2h));
    CHECK(r.n_test == *r.n_test_1h + *r.n_test_2h);
    CHECK(r.n_train + r.n_val + r.n_test == fm.n_rows());
    CHECK(r.n_features == 6);
  }
  const auto pooled = run_condition(fm, Condition::fs, ClassifierKind::gaussian_nb, 6, Hyperparams{}, 0);
  CHECK_FALSE(pooled.acc_1h.has_value());
  CHECK(pooled.n_train == 126);
  CHECK(pooled.n_features == 6);
  CHECK(run_condition(fm, Condition::sota, ClassifierKind::gaussian_nb, 6, Hyperparams{}, 0).n_features == 24);
}

TEST_CASE("fs with k = n_features matches sota") {
  const auto& fm = small_features();
  for (auto kind : kAllClassifiers) {
    CAPTURE(to_string(kind));
    const auto a = run_condition(fm, Condition::sota, kind, 5, Hyperparams{}, 2);
    const auto b = run_condition(fm, Condition::fs, kind, fm.n_cols(), Hyperparams{}, 2);
    CHECK(a.accuracy == b.accuracy);
  }
}

TEST_CASE("stratification failure inside a half names the half") {
  FeatureMatrix fm = small_features();
  // Make every second-half row label 0.
  const auto halves = split_halves(fm.rows);
  for (auto i : halves.second) fm.rows[i].label = 0;
  CHECK_THROWS_WITH_AS(run_condition(fm, Condition::twoheads, ClassifierKind::gaussian_nb, 4, Hyperparams{}, 0),
                       doctest::Contains("2H"), StratificationError);
}

TEST_CASE("benchmark cells, means and error coordinates") {
  const auto& fm = small_features();
  BenchConfig cfg;
  cfg.kinds = {ClassifierKind::knn};
  cfg.conditions = {Condition::fs};
  cfg.k = 8;
  const auto report = run_benchmark(fm, 0xabcULL, cfg);
  REQUIRE(report.cells.size() == 1);
  const auto& cell = report.cells[0];
  REQUIRE(cell.runs.size() == 5);
  double sum = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(cell.runs[i].seed == i);
    sum += cell.runs[i].accuracy;
  }
  CHECK(cell.mean_accuracy == doctest::Approx(sum / 5.0).epsilon(1e-12));
  CHECK(report.k == 8);
  CHECK(report.dataset_digest == 0xabcULL);
  CHECK(report.n_features == 24);
  CHECK(report.find(ClassifierKind::knn, Condition::fs) == &report.cells[0]);
  CHECK(report.find(ClassifierKind::knn, Condition::sota) == nullptr);

  FeatureMatrix bad = fm;
  for (auto& r : bad.rows) r.label = 1;
  cfg.conditions = {Condition::sota};
  CHECK_THROWS_WITH(run_benchmark(bad, 0, cfg), doctest::Contains("[knn / sota / seed 0]"));
  cfg.seeds.clear();
  CHECK_THROWS_AS(run_benchmark(fm, 0, cfg), ArgumentError);
}

TEST_CASE("reports: json round-trip, csv layout, determinism") {
  const auto& fm = small_features();
  BenchConfig cfg;
  cfg.seeds = {0, 1};
  cfg.k = 6;
  cfg.hp.random_forest.trees = 10;
  const auto report = run_benchmark(fm, 42, cfg);
  CHECK(report.cells.size() == 24);

  const auto j = report_to_json(report);
  CHECK(report_from_json(nlohmann::json::parse(j.dump())) == report);
  CHECK(j["config"]["dataset_digest"] == "000000000000002a");
  CHECK(j["config"]["hyperparams"]["random_forest"]["trees"] == 10);

  std::ostringstream csv;
  write_report_csv(report, csv);
  std::istringstream lines(csv.str());
  std::string line;
  std::size_t n = 0;
  std::getline(lines, line);
  CHECK(line == "classifier,condition,mean_acc,acc_1h,acc_2h,runtime_s");
  while (std::getline(lines, line)) {
    ++n;
    const bool two = line.find(",twoheads,") != std::string::npos;
    CHECK((line.find(",,") == std::string::npos) == two);
  }
  CHECK(n == 24);

  auto again = report_to_json(run_benchmark(fm, 42, cfg));
  auto first = j;
  strip_runtimes(first);
  strip_runtimes(again);
  CHECK(first.dump() == again.dump());
}

TEST_CASE("sota-only csv leaves the half columns empty") {
  BenchConfig cfg;
  cfg.kinds = {ClassifierKind::gaussian_nb};
  cfg.conditions = {Condition::sota};
  cfg.seeds = {0};
  const auto report = run_benchmark(small_features(), 1, cfg);
  std::ostringstream csv;
  write_report_csv(report, csv);
  CHECK(csv.str().find("gaussian_nb,sota,") != std::string::npos);
  CHECK(csv.str().find(",,,") != std::string::npos);
  CHECK(summary_table(report).find("1H") == std::string::npos);
}

TEST_CASE("emit writes the chosen format") {
  BenchConfig cfg;
  cfg.kinds = {ClassifierKind::gaussian_nb};
  cfg.conditions = {Condition::twoheads};
  cfg.seeds = {3};
  const auto report = run_benchmark(small_features(), 1, cfg);
  const auto dir = std::filesystem::temp_directory_path();
  emit_report(report, dir / "twoheads_report.json", ReportFormat::json);
  emit_report(report, dir / "twoheads_report.csv", ReportFormat::csv);
  std::ifstream js(dir / "twoheads_report.json");
  CHECK(report_from_json(nlohmann::json::parse(js)) == report);
  std::ifstream cs(dir / "twoheads_report.csv");
  std::string header;
  std::getline(cs, header);
  CHECK(header.rfind("classifier,", 0) == 0);
  CHECK_THROWS_AS(emit_report(report, dir / "no_such_dir" / "r.json", ReportFormat::json), IoError);
}

TEST_CASE("summary rounding is half away from zero") {
  CHECK(format_percent(93.05) == "93.1");
  CHECK(format_percent(96.45) == "96.5");
  CHECK(format_percent(97.55) == "97.6");
  CHECK(format_percent(92.75) == "92.8");
  CHECK(format_percent(100.0) == "100.0");
  CHECK(format_percent(0.04) == "0.0");
  CHECK(format_percent(-0.05) == "-0.1");
}

TEST_CASE("summary table shape") {
  BenchConfig cfg;
  cfg.seeds = {0};
  cfg.k = 6;
  cfg.hp.random_forest.trees = 5;
  const auto table = summary_table(run_benchmark(small_features(), 1, cfg));
  std::istringstream is(table);
  std::string header, line;
  std::getline(is, header);
  CHECK(header.find("SOTA") != std::string::npos);
  CHECK(header.find("1H+2H") != std::string::npos);
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    std::istringstream fields(line);
    std::string name, v;
    fields >> name;
    std::size_t cols = 0;
    while (fields >> v) {
      CHECK(v.find('.') == v.size() - 2);
      ++cols;
    }
    CHECK(cols == 5);
    ++rows;
  }
  CHECK(rows == 8);
  CHECK(table.find("gaussian_nb") < table.find("second_order_boost"));
}

TEST_CASE("pipeline leakage: non-training rows never reach the fitted models") {
  const auto& base = small_features();
  Rng rng(123);
  for (int trial = 0; trial < 20; ++trial) {
    const auto kind = kAllClassifiers[static_cast<std::size_t>(trial) % kAllClassifiers.size()];
    const std::uint64_t seed = rng.next() % 1000;
    const auto y = base.labels();
    const auto split = split_train_val_test(y, SplitRatios{}, seed);
    std::vector<int> y_train;
    for (auto i : split.train) y_train.push_back(y[i]);
    Hyperparams hp;
    hp.random_forest.trees = 5;
    auto fit_all = [&](const Matrix& X) {
      const Matrix train = X.select_rows(split.train);
      const auto sel = fit_selector(train, y_train, 6);
      const auto model = fit(kind, transform(train, sel), y_train, hp, seed);
      return to_json(sel) + to_json(model);
    };
    Matrix mutated = base.values;
    for (const auto* part : {&split.val, &split.test})
      for (auto i : *part)
        for (double& v : mutated.row(i)) v = rng.normal() * 1e3;
    CHECK(fit_all(base.values) == fit_all(mutated));
  }
}
