#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "twoheads/cli.hpp"
#include "twoheads/dataio.hpp"
#include "twoheads/dsp.hpp"
#include "twoheads/featsel.hpp"
#include "twoheads/segmentation.hpp"

using namespace twoheads;

// Regression checks against the seed-42 reference recording
// (30 subjects x 120 trials, 129 channels, 500 samples at 500 Hz).

namespace {

std::string fixture_path() {
  const char* p = std::getenv("TWOHEADS_FIXTURE");
  return p ? p : "";
}

const RecordingSet& fixture() {
  static const RecordingSet set = [] {
    const auto path = fixture_path();
    if (!path.empty()) return read_container(path);
    GeneratorConfig cfg;
    cfg.seed = 42;
    return generate_synthetic(cfg);
  }();
  return set;
}

// Features of the 1H rows, restricted to the training part of the seed-0 split.
struct FirstHalfTrain {
  FeatureMatrix features;
  std::vector<int> labels;
};

const FirstHalfTrain& first_half_train() {
  static const FirstHalfTrain fh = [] {
    const auto& set = fixture();
    const auto halves = split_halves(set);
    const FeatureMatrix all = extract_features(set, halves.first, FilterSpec{});
    const auto y = all.labels();
    const auto split = split_train_val_test(y, SplitRatios{}, 0);
    FirstHalfTrain out;
    out.features = all.select_rows(split.train);
    out.labels = out.features.labels();
    return out;
  }();
  return fh;
}

double oracle_f(const Matrix& X, std::span<const int> y, std::size_t col) {
  long double sum[2] = {0, 0}, n[2] = {0, 0};
  for (std::size_t r = 0; r < X.rows(); ++r) {
    sum[y[r]] += X(r, col);
    n[y[r]] += 1;
  }
  const long double mean[2] = {sum[0] / n[0], sum[1] / n[1]};
  const long double grand = (sum[0] + sum[1]) / (n[0] + n[1]);
  long double ssw = 0;
  for (std::size_t r = 0; r < X.rows(); ++r) ssw += (X(r, col) - mean[y[r]]) * (X(r, col) - mean[y[r]]);
  const long double ssb = n[0] * (mean[0] - grand) * (mean[0] - grand) + n[1] * (mean[1] - grand) * (mean[1] - grand);
  return static_cast<double>(ssb / (ssw / (n[0] + n[1] - 2)));
}

std::vector<std::string> listed_features(const std::string& out) {
  std::istringstream is(out);
  std::string line;
  std::getline(is, line);
  std::vector<std::string> names;
  while (std::getline(is, line)) {
    const auto a = line.find('\t'), b = line.rfind('\t');
    names.push_back(line.substr(a + 1, b - a - 1));
  }
  return names;
}

std::string inspect(const std::string& half, const std::string& top) {
  std::ostringstream out, err;
  const int code = run_cli({"inspect", "--data", fixture_path(), "--half", half, "--top", top}, out, err);
  REQUIRE(code == 0);
  return out.str();
}

}  // namespace

TEST_CASE("fixture file matches the in-memory generator") {
  GeneratorConfig cfg;
  cfg.seed = 42;
  const auto& set = fixture();
  CHECK(set.n_trials() == 3600);
  CHECK(set.n_channels == 129);
  CHECK(dataset_digest(set) == dataset_digest(generate_synthetic(cfg)));
}

TEST_CASE("1H training rows put every set_a amplitude in the top 16") {
  const auto& fh = first_half_train();
  REQUIRE(fh.features.n_cols() == 258);
  const auto model = fit_selector(fh.features.values, fh.labels, 16);
  std::vector<std::string> top;
  for (auto c : model.selected) top.push_back(fh.features.names[c].label());
  for (int ch = 0; ch < 8; ++ch) {
    const auto name = "ch" + std::to_string(ch) + "_amp";
    CAPTURE(name);
    CHECK(std::find(top.begin(), top.end(), name) != top.end());
  }
}

TEST_CASE("frozen 1H ranking agrees with the independent F oracle") {
  const auto& fh = first_half_train();
  const auto model = fit_selector(fh.features.values, fh.labels, 8);
  const auto order = rank_features(model.scores);
  std::vector<std::string> top8;
  for (std::size_t r = 0; r < 8; ++r) top8.push_back(fh.features.names[order[r]].label());
  const std::vector<std::string> frozen = {"ch5_amp", "ch7_amp", "ch3_amp", "ch2_amp",
                                           "ch1_amp", "ch0_amp", "ch6_amp", "ch4_amp"};
  CHECK(top8 == frozen);
  for (std::size_t c = 0; c < fh.features.n_cols(); ++c) {
    CAPTURE(c);
    const double want = oracle_f(fh.features.values, fh.labels, c);
    CHECK(std::abs(model.scores[c] - want) <= 1e-9 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("inspect lists only set_a amplitudes for 1H") {
  if (fixture_path().empty()) return;
  const auto names = listed_features(inspect("1h", "8"));
  const std::vector<std::string> frozen = {"ch5_amp", "ch1_amp", "ch3_amp", "ch2_amp",
                                           "ch7_amp", "ch6_amp", "ch4_amp", "ch0_amp"};
  CHECK(names == frozen);
}

TEST_CASE("pooled and 1H rankings differ") {
  if (fixture_path().empty()) return;
  const auto pooled = listed_features(inspect("all", "16"));
  const auto first = listed_features(inspect("1h", "16"));
  CHECK(pooled != first);
  // Pooling over both halves pulls the set_b amplitudes into the top 16.
  CHECK(std::count_if(pooled.begin(), pooled.end(), [](const std::string& s) {
          return s.ends_with("_amp") && std::stoi(s.substr(2)) >= 64 && std::stoi(s.substr(2)) < 72;
        }) == 8);
  CHECK(std::none_of(first.begin(), first.end(), [](const std::string& s) {
    return s.ends_with("_amp") && std::stoi(s.substr(2)) >= 64 && std::stoi(s.substr(2)) < 72;
  }));
}
