#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "twoheads/matrix.hpp"
#include "twoheads/rng.hpp"

namespace testing {

struct Dataset {
  twoheads::Matrix X;
  std::vector<int> y;
};

// Two isotropic Gaussian blobs centred at -sep/2 and +sep/2 along the first
// axis, unit variance, labels alternating so both classes have n/2 rows.
inline Dataset blobs(std::size_t n, std::size_t d, double sep, std::uint64_t seed) {
  twoheads::Rng rng(seed);
  Dataset ds{twoheads::Matrix(n, d), std::vector<int>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    ds.y[i] = label;
    for (std::size_t j = 0; j < d; ++j) ds.X(i, j) = rng.normal();
    ds.X(i, 0) += label ? sep / 2.0 : -sep / 2.0;
  }
  return ds;
}

// Four clusters at (+-2, +-2); label 1 when the signs differ.
inline Dataset xor_clusters(std::size_t n, std::uint64_t seed) {
  twoheads::Rng rng(seed);
  Dataset ds{twoheads::Matrix(n, 2), std::vector<int>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double sx = (i % 4) < 2 ? -2.0 : 2.0;
    const double sy = (i % 2) == 0 ? -2.0 : 2.0;
    ds.X(i, 0) = sx + 0.5 * rng.normal();
    ds.X(i, 1) = sy + 0.5 * rng.normal();
    ds.y[i] = (sx * sy < 0) ? 1 : 0;
  }
  return ds;
}

inline Dataset random_labels(std::size_t n, std::size_t d, std::uint64_t seed) {
  twoheads::Rng rng(seed);
  Dataset ds{twoheads::Matrix(n, d), std::vector<int>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) ds.X(i, j) = rng.normal();
    ds.y[i] = static_cast<int>(rng.below(2));
  }
  return ds;
}

// Two-sided 99.9% normal band for a binomial proportion around 0.5.
inline double chance_halfwidth(std::size_t n) { return 3.2905 * std::sqrt(0.25 / static_cast<double>(n)); }

inline bool rel_close(double a, double b, double tol) {
  if (a == b) return true;
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace testing
