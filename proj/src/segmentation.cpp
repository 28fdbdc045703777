#include "twoheads/segmentation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "twoheads/error.hpp"
#include "twoheads/rng.hpp"

namespace twoheads {

HalfAssignment split_halves(std::span<const RowMeta> rows) {
  std::map<std::uint32_t, std::uint32_t> count;
  for (const auto& r : rows) ++count[r.subject_id];
  for (const auto& [subject, m] : count)
    if (m < 2)
      throw ValidationError("subject " + std::to_string(subject) + " has " + std::to_string(m) +
                            " trial(s); halving needs at least 2");
  HalfAssignment out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::uint32_t m = count[rows[i].subject_id];
    if (rows[i].chrono_index < (m + 1) / 2)
      out.first.push_back(i);
    else
      out.second.push_back(i);
  }
  return out;
}

HalfAssignment split_halves(const RecordingSet& set) {
  std::vector<RowMeta> rows;
  rows.reserve(set.n_trials());
  for (const auto& t : set.trials) rows.push_back({t.subject_id, t.chrono_index, t.label});
  return split_halves(rows);
}

namespace {

// Largest-remainder apportionment of `total` over groups with the given
// ideal shares and capacities. Ties go to the lower group index.
std::array<std::size_t, 2> apportion(std::size_t total, std::array<double, 2> ideal,
                                     std::array<std::size_t, 2> cap) {
  std::array<std::size_t, 2> out{};
  std::size_t assigned = 0;
  for (int g = 0; g < 2; ++g) {
    out[g] = std::min(cap[g], static_cast<std::size_t>(std::floor(ideal[g])));
    assigned += out[g];
  }
  while (assigned < total) {
    int best = -1;
    double best_frac = -1.0;
    for (int g = 0; g < 2; ++g) {
      if (out[g] >= cap[g]) continue;
      const double frac = ideal[g] - static_cast<double>(out[g]);
      if (frac > best_frac) {
        best_frac = frac;
        best = g;
      }
    }
    if (best < 0) break;
    ++out[best];
    ++assigned;
  }
  return out;
}

}  // namespace

SplitIndices split_train_val_test(std::span<const int> labels, SplitRatios ratios, std::uint64_t seed) {
  const std::size_t n = labels.size();
  if (n < 10) throw ArgumentError("split_train_val_test: need at least 10 rows, got " + std::to_string(n));
  if (!(ratios.train > 0.0 && ratios.val >= 0.0 && ratios.test >= 0.0) ||
      std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9)
    throw ArgumentError("split_train_val_test: ratios must be non-negative and sum to 1");

  std::array<std::vector<std::size_t>, 2> groups;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != 0 && labels[i] != 1)
      throw ArgumentError("split_train_val_test: label at row " + std::to_string(i) + " is not 0/1");
    groups[labels[i]].push_back(i);
  }
  if (groups[0].empty() || groups[1].empty())
    throw StratificationError("split_train_val_test: only one label present");

  Rng rng(seed);
  for (auto& g : groups) rng.shuffle(std::span<std::size_t>(g));

  const std::size_t n_train = static_cast<std::size_t>(std::floor(ratios.train * n + 0.5));
  const std::size_t rest = n - n_train;
  const double val_share = ratios.val + ratios.test > 0.0 ? ratios.val / (ratios.val + ratios.test) : 0.0;
  const std::size_t n_val = static_cast<std::size_t>(std::floor(val_share * rest + 0.5));

  const std::array<std::size_t, 2> size{groups[0].size(), groups[1].size()};
  auto share = [&](std::size_t quota) {
    return std::array<double, 2>{static_cast<double>(size[0]) * quota / n,
                                 static_cast<double>(size[1]) * quota / n};
  };
  auto train = apportion(n_train, share(n_train), size);
  auto val = apportion(n_val, share(n_val), {size[0] - train[0], size[1] - train[1]});

  // Every label must reach the training set.
  for (int g = 0; g < 2; ++g) {
    if (train[g] > 0) continue;
    const int other = 1 - g;
    ++train[g];
    --train[other];
    if (val[g] > 0) {
      --val[g];
      ++val[other];
    }
  }

  SplitIndices out;
  out.ratios = ratios;
  out.seed = seed;
  for (int g = 0; g < 2; ++g) {
    const auto& idx = groups[g];
    out.train.insert(out.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(train[g]));
    out.val.insert(out.val.end(), idx.begin() + static_cast<std::ptrdiff_t>(train[g]),
                   idx.begin() + static_cast<std::ptrdiff_t>(train[g] + val[g]));
    out.test.insert(out.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(train[g] + val[g]), idx.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.val.begin(), out.val.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace twoheads
