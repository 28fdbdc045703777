#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "support.hpp"
#include "twoheads/error.hpp"
#include "twoheads/featsel.hpp"
#include "twoheads/segmentation.hpp"

using namespace twoheads;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// From-scratch one-way ANOVA: total, between and within sums of squares
// computed independently, then F = (SSB / (g - 1)) / (SSW / (N - g)).
double anova_oracle(const std::vector<std::vector<double>>& groups) {
  std::size_t n = 0;
  long double grand = 0.0L;
  for (const auto& g : groups)
    for (double v : g) {
      grand += v;
      ++n;
    }
  grand /= static_cast<long double>(n);
  long double ssb = 0.0L, ssw = 0.0L;
  for (const auto& g : groups) {
    long double m = 0.0L;
    for (double v : g) m += v;
    m /= static_cast<long double>(g.size());
    ssb += static_cast<long double>(g.size()) * (m - grand) * (m - grand);
    for (double v : g) ssw += (v - m) * (v - m);
  }
  const double k = static_cast<double>(groups.size());
  return static_cast<double>((ssb / (k - 1.0)) / (ssw / (static_cast<double>(n) - k)));
}

// Pooled-variance two-sample t statistic.
double t_statistic(const std::vector<double>& a, const std::vector<double>& b) {
  auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); };
  const double ma = mean(a), mb = mean(b);
  double sa = 0.0, sb = 0.0;
  for (double v : a) sa += (v - ma) * (v - ma);
  for (double v : b) sb += (v - mb) * (v - mb);
  const double na = double(a.size()), nb = double(b.size());
  const double sp2 = (sa + sb) / (na + nb - 2.0);
  return (ma - mb) / std::sqrt(sp2 * (1.0 / na + 1.0 / nb));
}

std::vector<std::vector<double>> column_groups(const Matrix& X, std::span<const int> y, std::size_t f) {
  std::vector<std::vector<double>> g(2);
  for (std::size_t r = 0; r < X.rows(); ++r) g[y[r]].push_back(X(r, f));
  return g;
}

}  // namespace

TEST_CASE("hand example F = 13.5") {
  const std::vector<std::vector<double>> g = {{1, 2, 3}, {4, 5, 6}};
  CHECK(anova_f(g) == doctest::Approx(13.5).epsilon(1e-12));
  CHECK(anova_oracle(g) == doctest::Approx(13.5).epsilon(1e-12));
}

TEST_CASE("identical groups score zero, separated constants score infinity") {
  const std::vector<std::vector<double>> same = {{1, 2, 3}, {1, 2, 3}};
  CHECK(anova_f(same) == 0.0);
  const std::vector<std::vector<double>> sep = {{1, 1}, {2, 2}};
  CHECK(anova_f(sep) == kInf);
  const std::vector<std::vector<double>> flat = {{0.1, 0.1, 0.1}, {0.1, 0.1}};
  CHECK(anova_f(flat) == 0.0);
}

TEST_CASE("anova preconditions") {
  CHECK_THROWS_AS(anova_f(std::vector<std::vector<double>>{{1, 2}}), ArgumentError);
  CHECK_THROWS_AS(anova_f(std::vector<std::vector<double>>{{1, 2}, {}}), ArgumentError);
  CHECK_THROWS_AS(anova_f(std::vector<std::vector<double>>{{1}, {2}}), ArgumentError);
}

TEST_CASE("oracle equivalence on 100 random small instances") {
  Rng rng(31337);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t rows = 3 + rng.below(10), cols = 1 + rng.below(6);
    Matrix X(rows, cols);
    std::vector<int> y(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      y[r] = r < 2 ? static_cast<int>(r) : static_cast<int>(rng.below(2));
      for (std::size_t c = 0; c < cols; ++c) X(r, c) = rng.normal() * 3.0 + (y[r] ? rng.uniform() : 0.0);
    }
    const auto model = fit_selector(X, y, 1);
    for (std::size_t c = 0; c < cols; ++c) {
      const auto groups = column_groups(X, y, c);
      CHECK(testing::rel_close(model.scores[c], anova_oracle(groups), 1e-9));
    }
  }
}

TEST_CASE("F equals t squared for two groups") {
  Rng rng(4);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> a(2 + rng.below(20)), b(2 + rng.below(20));
    for (auto& v : a) v = rng.normal();
    for (auto& v : b) v = rng.normal() + 0.5;
    const double t = t_statistic(a, b);
    const std::vector<std::vector<double>> g = {a, b};
    CHECK(testing::rel_close(anova_f(g), t * t, 1e-9));
  }
}

TEST_CASE("affine maps leave scores and selection unchanged") {
  Rng rng(12);
  for (int rep = 0; rep < 20; ++rep) {
    const auto ds = testing::blobs(40, 8, 1.0, rng.next());
    Matrix Z = ds.X;
    std::vector<double> a(8), b(8);
    for (std::size_t c = 0; c < 8; ++c) {
      a[c] = (rng.uniform() * 9.0 + 0.1) * (rng.below(2) ? 1.0 : -1.0);
      b[c] = rng.normal() * 100.0;
      for (std::size_t r = 0; r < 40; ++r) Z(r, c) = a[c] * Z(r, c) + b[c];
    }
    const auto m0 = fit_selector(ds.X, ds.y, 3);
    const auto m1 = fit_selector(Z, ds.y, 3);
    for (std::size_t c = 0; c < 8; ++c) CHECK(testing::rel_close(m0.scores[c], m1.scores[c], 1e-9));
    CHECK(m0.selected == m1.selected);
  }
}

TEST_CASE("permuting rows with labels leaves scores unchanged") {
  const auto ds = testing::blobs(60, 5, 1.5, 3);
  std::vector<std::size_t> perm(60);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(1);
  rng.shuffle(std::span(perm));
  std::vector<int> y(60);
  for (std::size_t i = 0; i < 60; ++i) y[i] = ds.y[perm[i]];
  const auto a = fit_selector(ds.X, ds.y, 2);
  const auto b = fit_selector(ds.X.select_rows(perm), y, 2);
  for (std::size_t c = 0; c < 5; ++c) CHECK(testing::rel_close(a.scores[c], b.scores[c], 1e-12));
  CHECK(a.selected == b.selected);
}

TEST_CASE("label-equal feature is infinite and ranked first, constant feature scores zero") {
  Rng rng(9);
  Matrix X(30, 4);
  std::vector<int> y(30);
  for (std::size_t r = 0; r < 30; ++r) {
    y[r] = static_cast<int>(r % 2);
    X(r, 0) = rng.normal();
    X(r, 1) = 7.0;
    X(r, 2) = y[r];
    X(r, 3) = rng.normal() + 2.0 * y[r];
  }
  const auto m = fit_selector(X, y, 1);
  CHECK(m.scores[2] == kInf);
  CHECK(m.scores[1] == 0.0);
  CHECK(m.selected == std::vector<std::size_t>{2});
  const auto order = rank_features(m.scores);
  CHECK(order.front() == 2);
  CHECK(order.back() == 1);
  // The constant column is only picked once k covers everything ranked above it.
  CHECK(fit_selector(X, y, 3).selected == std::vector<std::size_t>{0, 2, 3});
  CHECK(fit_selector(X, y, 4).selected == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("ranking ties and sentinels resolve to the lower index") {
  const std::vector<double> s = {1.0, kInf, 3.0, kInf, 3.0, 0.0};
  CHECK(rank_features(s) == std::vector<std::size_t>{1, 3, 2, 4, 0, 5});
}

TEST_CASE("transform examples") {
  const auto ds = testing::blobs(20, 6, 2.0, 1);
  const auto all = fit_selector(ds.X, ds.y, 6);
  CHECK(transform(ds.X, all) == ds.X);
  SelectorModel first = all;
  first.selected = {0};
  const Matrix t = transform(ds.X, first);
  REQUIRE(t.cols() == 1);
  for (std::size_t r = 0; r < 20; ++r) CHECK(t(r, 0) == ds.X(r, 0));
  CHECK_THROWS_AS(transform(Matrix(3, 5), all), ArgumentError);
  // Train and test get the same column provenance.
  const auto m = fit_selector(ds.X, ds.y, 2);
  const auto other = testing::blobs(7, 6, 2.0, 2);
  const Matrix a = transform(ds.X, m), b = transform(other.X, m);
  CHECK(a.cols() == b.cols());
  for (std::size_t j = 0; j < 2; ++j) CHECK(a(0, j) == ds.X(0, m.selected[j]));
  for (std::size_t j = 0; j < 2; ++j) CHECK(b(0, j) == other.X(0, m.selected[j]));
}

TEST_CASE("k larger than the feature count is clamped with a warning") {
  const auto ds = testing::blobs(20, 3, 2.0, 1);
  const auto m = fit_selector(ds.X, ds.y, 50);
  CHECK(m.k == 3);
  CHECK(m.selected.size() == 3);
  REQUIRE(m.warning.has_value());
  CHECK(m.warning->find("clamped") != std::string::npos);
  CHECK_FALSE(fit_selector(ds.X, ds.y, 3).warning.has_value());
}

TEST_CASE("selector preconditions") {
  const auto ds = testing::blobs(20, 3, 2.0, 1);
  CHECK_THROWS_AS(fit_selector(ds.X, ds.y, 0), ArgumentError);
  CHECK_THROWS_AS(fit_selector(ds.X, std::vector<int>(20, 1), 2), StratificationError);
  CHECK_THROWS_AS(fit_selector(ds.X, std::vector<int>(19, 1), 2), ArgumentError);
}

TEST_CASE("selector json round-trip keeps the infinity sentinel") {
  Matrix X(6, 3);
  std::vector<int> y = {0, 0, 0, 1, 1, 1};
  for (std::size_t r = 0; r < 6; ++r) {
    X(r, 0) = y[r];
    X(r, 1) = double(r * r) * 0.1;
    X(r, 2) = 1.0;
  }
  const auto m = fit_selector(X, y, 9);
  const auto back = selector_from_json(to_json(m));
  CHECK(back == m);
  CHECK(back.scores[0] == kInf);
}

TEST_CASE("no leakage: rows outside the training set cannot change the selector") {
  Rng rng(77);
  for (int rep = 0; rep < 20; ++rep) {
    auto ds = testing::blobs(80, 6, 1.0, rng.next());
    const auto split = split_train_val_test(ds.y, SplitRatios{}, rep);
    auto fit_on = [&](const Matrix& X) {
      std::vector<int> y;
      for (auto i : split.train) y.push_back(ds.y[i]);
      return fit_selector(X.select_rows(split.train), y, 3);
    };
    const auto before = fit_on(ds.X);
    Matrix mutated = ds.X;
    for (const auto* part : {&split.val, &split.test})
      for (auto i : *part)
        for (std::size_t c = 0; c < 6; ++c) mutated(i, c) = rng.normal() * 1e6;
    const auto after = fit_on(mutated);
    CHECK(to_json(before) == to_json(after));
  }
}
