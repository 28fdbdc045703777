#include "twoheads/dsp.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <ostream>
#include <thread>

#include "twoheads/error.hpp"

namespace twoheads {

namespace {

// FFTW plans are created once per (length, direction) and executed through
// the new-array interface, which is thread-safe. Planning is not, hence the
// mutex. FFTW_ESTIMATE keeps plan choice (and so rounding) reproducible.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find({n, sign});
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n));
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(std::pair{n, sign}, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

void dft_inplace(std::vector<std::complex<double>>& data, int sign) {
  fftw_plan plan = plan_cache().get(static_cast<int>(data.size()), sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

std::size_t window_begin(std::size_t n) { return n / 10; }

}  // namespace

void FilterSpec::validate() const {
  if (!(sample_rate_hz > 0.0)) throw ConfigError("filter: sample_rate_hz must be > 0");
  if (!(low_hz > 0.0 && low_hz < high_hz && high_hz < sample_rate_hz / 2.0))
    throw ConfigError("filter: need 0 < low_hz < high_hz < sample_rate_hz / 2");
  if (n_taps < 3 || n_taps % 2 == 0) throw ConfigError("filter: n_taps must be odd and >= 3");
}

std::complex<double> frequency_response(std::span<const double> taps, double freq_hz,
                                        double sample_rate_hz) {
  const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate_hz;
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t n = 0; n < taps.size(); ++n)
    acc += taps[n] * std::polar(1.0, -w * static_cast<double>(n));
  return acc;
}

std::vector<double> design_bandpass(const FilterSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n_taps;
  const double center = static_cast<double>(n - 1) / 2.0;
  const double fh = 2.0 * spec.high_hz / spec.sample_rate_hz;  // cycles per sample, x2
  const double fl = 2.0 * spec.low_hz / spec.sample_rate_hz;
  std::vector<double> taps(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double m = static_cast<double>(i) - center;
    const double ideal = fh * sinc(fh * m) - fl * sinc(fl * m);
    const double hamming = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / static_cast<double>(n - 1));
    taps[i] = ideal * hamming;
  }
  // Exact symmetry, independent of rounding in the window/sinc evaluation.
  for (std::size_t i = 0; i < n / 2; ++i) taps[n - 1 - i] = taps[i];

  const double gain =
      std::abs(frequency_response(taps, std::sqrt(spec.low_hz * spec.high_hz), spec.sample_rate_hz));
  for (double& t : taps) t /= gain;
  return taps;
}

std::vector<double> filter_zero_phase(std::span<const double> x, std::span<const double> taps) {
  const std::size_t nt = taps.size();
  const std::size_t n = x.size();
  const std::size_t pad = 3 * nt;
  if (nt == 0) throw PreconditionError("filter_zero_phase: empty tap vector");
  if (n <= pad)
    throw PreconditionError("filter_zero_phase: input length " + std::to_string(n) +
                            " must exceed 3 * n_taps = " + std::to_string(pad));

  // Odd extension: ext[pad + i] = x[i].
  std::vector<double> ext(n + 2 * pad);
  std::copy(x.begin(), x.end(), ext.begin() + static_cast<std::ptrdiff_t>(pad));
  for (std::size_t j = 1; j <= pad; ++j) {
    ext[pad - j] = 2.0 * x[0] - x[j];
    ext[pad + n - 1 + j] = 2.0 * x[n - 1] - x[n - 1 - j];
  }

  // Only outputs that reach the returned window are computed. Because
  // pad >= n_taps, none of them touch the initial conditions of either
  // pass, so this equals the full forward / reverse / forward / reverse
  // sequence on the padded signal.
  const std::size_t m1 = n + nt - 1;
  std::vector<double> fwd(m1, 0.0);
  for (std::size_t k = 0; k < nt; ++k) {
    const double hk = taps[k];
    const double* src = ext.data() + pad - k;
    for (std::size_t j = 0; j < m1; ++j) fwd[j] += hk * src[j];
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < nt; ++k) {
    const double hk = taps[k];
    const double* src = fwd.data() + k;
    for (std::size_t j = 0; j < n; ++j) out[j] += hk * src[j];
  }
  return out;
}

std::vector<std::complex<double>> analytic_signal(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) throw PreconditionError("analytic_signal: need at least 2 samples");
  std::vector<std::complex<double>> z(x.begin(), x.end());
  dft_inplace(z, FFTW_FORWARD);
  const std::size_t positive_end = (n + 1) / 2;  // bins 1 .. ceil(n/2) - 1 doubled
  for (std::size_t k = 1; k < positive_end; ++k) z[k] *= 2.0;
  for (std::size_t k = positive_end; k < n; ++k)
    if (!(n % 2 == 0 && k == n / 2)) z[k] = 0.0;
  dft_inplace(z, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& v : z) v *= scale;
  return z;
}

std::string FeatureName::label() const {
  return "ch" + std::to_string(channel) + (kind == FeatureKind::amplitude ? "_amp" : "_phase");
}

std::vector<int> FeatureMatrix::labels() const {
  std::vector<int> y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) y[i] = rows[i].label;
  return y;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> idx) const {
  FeatureMatrix out;
  out.values = values.select_rows(idx);
  out.names = names;
  out.rows.reserve(idx.size());
  for (auto i : idx) out.rows.push_back(rows[i]);
  return out;
}

ChannelFeatures channel_features(std::span<const double> x, std::span<const double> taps) {
  const auto filtered = filter_zero_phase(x, taps);
  const auto z = analytic_signal(filtered);
  const std::size_t begin = window_begin(z.size());
  const std::size_t end = z.size() - begin;
  double envelope = 0.0, re = 0.0, im = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double mag = std::abs(z[i]);
    envelope += mag;
    if (mag > 0.0) {
      re += z[i].real() / mag;
      im += z[i].imag() / mag;
    }
  }
  ChannelFeatures f;
  f.amplitude = envelope / static_cast<double>(end - begin);
  f.phase = (re == 0.0 && im == 0.0) ? 0.0 : std::atan2(im, re);
  if (f.phase == -std::numbers::pi) f.phase = std::numbers::pi;
  return f;
}

FeatureMatrix extract_features(const RecordingSet& set, const FilterSpec& spec, unsigned threads) {
  std::vector<std::size_t> all(set.n_trials());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return extract_features(set, all, spec, threads);
}

FeatureMatrix extract_features(const RecordingSet& set, std::span<const std::size_t> trial_indices,
                               const FilterSpec& spec, unsigned threads) {
  if (std::abs(spec.sample_rate_hz - static_cast<double>(set.sample_rate_hz)) > 1e-6)
    throw ArgumentError("extract_features: filter sample rate does not match the recording");
  const auto taps = design_bandpass(spec);
  const std::size_t n_ch = set.n_channels;
  const std::size_t n_s = set.n_samples;

  FeatureMatrix out;
  out.values = Matrix(trial_indices.size(), 2 * n_ch);
  out.names.reserve(2 * n_ch);
  for (std::uint32_t c = 0; c < n_ch; ++c) {
    out.names.push_back({c, FeatureKind::amplitude});
    out.names.push_back({c, FeatureKind::phase});
  }
  out.rows.reserve(trial_indices.size());
  for (auto i : trial_indices) {
    const Trial& t = set.trials.at(i);
    if (n_s <= 3 * taps.size())
      throw PreconditionError("trial (subject " + std::to_string(t.subject_id) + ", chrono " +
                              std::to_string(t.chrono_index) + "): " + std::to_string(n_s) +
                              " samples, filter needs more than " + std::to_string(3 * taps.size()));
    out.rows.push_back({t.subject_id, t.chrono_index, t.label});
  }

  auto work = [&](std::size_t row_begin, std::size_t row_end) {
    std::vector<double> buf(n_s);
    for (std::size_t r = row_begin; r < row_end; ++r) {
      const Trial& t = set.trials[trial_indices[r]];
      auto dst = out.values.row(r);
      for (std::size_t c = 0; c < n_ch; ++c) {
        auto ch = t.channel(c, n_s);
        std::copy(ch.begin(), ch.end(), buf.begin());
        const auto f = channel_features(buf, taps);
        dst[2 * c] = f.amplitude;
        dst[2 * c + 1] = f.phase;
      }
    }
  };

  const std::size_t rows = trial_indices.size();
  if (threads <= 1 || rows < 2) {
    work(0, rows);
  } else {
    const std::size_t n_workers = std::min<std::size_t>(threads, rows);
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w)
      pool.emplace_back(work, rows * w / n_workers, rows * (w + 1) / n_workers);
  }
  return out;
}

void write_features_csv(const FeatureMatrix& features, std::ostream& os) {
  os << "subject,chrono_index,label";
  for (const auto& name : features.names) os << ',' << name.label();
  os << '\n';
  char buf[32];
  for (std::size_t r = 0; r < features.n_rows(); ++r) {
    const auto& meta = features.rows[r];
    os << meta.subject_id << ',' << meta.chrono_index << ',' << static_cast<int>(meta.label);
    for (double v : features.values.row(r)) {
      std::snprintf(buf, sizeof buf, "%.9g", v);
      os << ',' << buf;
    }
    os << '\n';
  }
}

}  // namespace twoheads
