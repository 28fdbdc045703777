#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "twoheads/dataio.hpp"
#include "twoheads/matrix.hpp"

namespace twoheads {

// Alpha-band FIR band-pass. n_taps must be odd.
struct FilterSpec {
  double low_hz = 8.0;
  double high_hz = 13.0;
  std::size_t n_taps = 161;
  double sample_rate_hz = 500.0;

  // Throws ConfigError.
  void validate() const;
  bool operator==(const FilterSpec&) const = default;
};

// Hamming-windowed difference of low-pass sincs, scaled to unit gain at
// sqrt(low * high).
std::vector<double> design_bandpass(const FilterSpec& spec);

// H(f) = sum_n h[n] exp(-i 2 pi f n / fs).
std::complex<double> frequency_response(std::span<const double> taps, double freq_hz,
                                        double sample_rate_hz);

// Forward-backward FIR filtering with odd reflection padding of 3 * n_taps
// samples at both ends. Zero phase, magnitude |H|^2, same length as x.
// Requires x.size() > 3 * taps.size().
std::vector<double> filter_zero_phase(std::span<const double> x, std::span<const double> taps);

// Discrete analytic signal by bin weighting of an exact-length DFT.
// Requires x.size() >= 2.
std::vector<std::complex<double>> analytic_signal(std::span<const double> x);

enum class FeatureKind : std::uint8_t { amplitude, phase };

struct FeatureName {
  std::uint32_t channel = 0;
  FeatureKind kind = FeatureKind::amplitude;

  std::string label() const;  // "ch3_amp" / "ch3_phase"
  bool operator==(const FeatureName&) const = default;
};

struct RowMeta {
  std::uint32_t subject_id = 0;
  std::uint32_t chrono_index = 0;
  std::uint8_t label = 0;

  bool operator==(const RowMeta&) const = default;
};

// Trials x (2 * n_channels). Column 2c is channel c's amplitude, 2c + 1 its
// phase.
struct FeatureMatrix {
  Matrix values;
  std::vector<FeatureName> names;
  std::vector<RowMeta> rows;

  std::size_t n_rows() const { return values.rows(); }
  std::size_t n_cols() const { return values.cols(); }
  std::vector<int> labels() const;
  FeatureMatrix select_rows(std::span<const std::size_t> idx) const;

  bool operator==(const FeatureMatrix&) const = default;
};

struct ChannelFeatures {
  double amplitude = 0.0;
  double phase = 0.0;
};

// Band-pass, analytic signal, then mean envelope and circular-mean phase
// over the central 80% of samples.
ChannelFeatures channel_features(std::span<const double> x, std::span<const double> taps);

// `threads` <= 1 runs sequentially; output is identical either way.
FeatureMatrix extract_features(const RecordingSet& set, const FilterSpec& spec, unsigned threads = 0);

// Same, restricted to the given trial indices (rows come out in that order).
FeatureMatrix extract_features(const RecordingSet& set, std::span<const std::size_t> trial_indices,
                               const FilterSpec& spec, unsigned threads = 0);

// Header `subject,chrono_index,label,ch0_amp,ch0_phase,...`, 9 significant
// digits.
void write_features_csv(const FeatureMatrix& features, std::ostream& os);

}  // namespace twoheads
