#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "twoheads/dataio.hpp"
#include "twoheads/dsp.hpp"

namespace twoheads {

// Global row indices of each subject's first (1H) and second (2H)
// chronological half. Both lists keep input order.
struct HalfAssignment {
  std::vector<std::size_t> first;
  std::vector<std::size_t> second;
};

enum class Half { first, second };

// Per subject with m trials, chrono indices < ceil(m / 2) go to 1H.
// Throws ValidationError if a subject has fewer than 2 trials.
HalfAssignment split_halves(std::span<const RowMeta> rows);
HalfAssignment split_halves(const RecordingSet& set);

struct SplitRatios {
  double train = 0.7;
  double val = 0.15;
  double test = 0.15;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
  SplitRatios ratios;
  std::uint64_t seed = 0;
};

// Stratified seeded split. |train| = round(ratio * n); val and test share
// the rest (val takes the odd one). Each partition's quota is apportioned
// across labels by largest remainder. Indices in each partition are sorted.
// Throws StratificationError unless both labels are present, and
// ArgumentError for n < 10.
SplitIndices split_train_val_test(std::span<const int> labels, SplitRatios ratios, std::uint64_t seed);

}  // namespace twoheads
