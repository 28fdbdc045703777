#include "twoheads/dataio.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "twoheads/error.hpp"
#include "twoheads/rng.hpp"

namespace twoheads {

namespace {

constexpr std::array<char, 8> kMagic = {'E', 'E', 'G', 'B', 'I', 'N', '0', '1'};

void put_u32(std::byte* out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<std::byte>((v >> (8 * i)) & 0xFFu);
}

std::uint32_t get_u32(const std::byte* in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[i]) << (8 * i);
  return v;
}

void put_floats(std::byte* out, std::span<const float> values) {
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(out, values.data(), values.size_bytes());
  } else {
    for (std::size_t i = 0; i < values.size(); ++i)
      put_u32(out + 4 * i, std::bit_cast<std::uint32_t>(values[i]));
  }
}

void get_floats(const std::byte* in, std::span<float> values) {
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(values.data(), in, values.size_bytes());
  } else {
    for (std::size_t i = 0; i < values.size(); ++i)
      values[i] = std::bit_cast<float>(get_u32(in + 4 * i));
  }
}

std::string trial_tag(std::size_t index, const Trial& t) {
  std::ostringstream os;
  os << "trial " << index << " (subject " << t.subject_id << ", chrono " << t.chrono_index << ")";
  return os.str();
}

}  // namespace

std::size_t RecordingSet::n_subjects() const {
  std::set<std::uint32_t> ids;
  for (const auto& t : trials) ids.insert(t.subject_id);
  return ids.size();
}

bool bitwise_equal(const RecordingSet& a, const RecordingSet& b) {
  if (a.n_channels != b.n_channels || a.n_samples != b.n_samples ||
      std::bit_cast<std::uint32_t>(a.sample_rate_hz) != std::bit_cast<std::uint32_t>(b.sample_rate_hz) ||
      a.trials.size() != b.trials.size())
    return false;
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    const auto& x = a.trials[i];
    const auto& y = b.trials[i];
    if (x.subject_id != y.subject_id || x.chrono_index != y.chrono_index || x.label != y.label ||
        x.samples.size() != y.samples.size())
      return false;
    if (!x.samples.empty() &&
        std::memcmp(x.samples.data(), y.samples.data(), x.samples.size() * sizeof(float)) != 0)
      return false;
  }
  return true;
}

void validate(const RecordingSet& set) {
  if (!(set.sample_rate_hz > 0.0f) || !std::isfinite(set.sample_rate_hz))
    throw ValidationError("sample_rate_hz must be positive and finite");
  const std::size_t expected = static_cast<std::size_t>(set.n_channels) * set.n_samples;
  std::map<std::uint32_t, std::vector<std::uint32_t>> chrono_by_subject;
  for (std::size_t i = 0; i < set.trials.size(); ++i) {
    const Trial& t = set.trials[i];
    if (t.label > 1)
      throw ValidationError(trial_tag(i, t) + ": label " + std::to_string(t.label) + " is not 0 or 1");
    if (t.samples.size() != expected)
      throw ValidationError(trial_tag(i, t) + ": has " + std::to_string(t.samples.size()) +
                            " samples, expected " + std::to_string(expected));
    for (float v : t.samples)
      if (!std::isfinite(v)) throw ValidationError(trial_tag(i, t) + ": non-finite sample");
    chrono_by_subject[t.subject_id].push_back(t.chrono_index);
  }
  for (auto& [subject, chrono] : chrono_by_subject) {
    std::sort(chrono.begin(), chrono.end());
    for (std::size_t j = 0; j < chrono.size(); ++j)
      if (chrono[j] != j)
        throw ValidationError("subject " + std::to_string(subject) +
                              ": chrono_index values are not 0..m-1 without gaps or duplicates");
  }
}

void GeneratorConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("invalid generator config: " + field + " " + why);
  };
  if (n_subjects < 1) fail("n_subjects", "must be >= 1");
  if (trials_per_subject < 2) fail("trials_per_subject", "must be >= 2");
  if (n_channels < 1) fail("n_channels", "must be >= 1");
  if (n_samples < 1) fail("n_samples", "must be >= 1");
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) fail("sample_rate_hz", "must be > 0");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) fail("noise_sigma", "must be >= 0");
  if (!(carrier_hz > 0.0) || !(carrier_hz < sample_rate_hz / 2.0)) fail("carrier_hz", "must lie in (0, fs/2)");
  if (!std::isfinite(base_amp)) fail("base_amp", "must be finite");
  if (!std::isfinite(contrast)) fail("contrast", "must be finite");
  if (!(decay >= 0.0 && decay < 1.0)) fail("decay", "must lie in [0, 1)");
  for (auto c : set_a)
    if (c >= n_channels) fail("set_a", "contains channel " + std::to_string(c) + " >= n_channels");
  for (auto c : set_b)
    if (c >= n_channels) fail("set_b", "contains channel " + std::to_string(c) + " >= n_channels");
  const std::set<std::uint32_t> a(set_a.begin(), set_a.end());
  for (auto c : set_b)
    if (a.count(c)) fail("set_b", "overlaps set_a at channel " + std::to_string(c));
}

RecordingSet generate_synthetic(const GeneratorConfig& cfg) {
  cfg.validate();
  RecordingSet out;
  out.n_channels = cfg.n_channels;
  out.n_samples = cfg.n_samples;
  out.sample_rate_hz = static_cast<float>(cfg.sample_rate_hz);
  out.trials.reserve(static_cast<std::size_t>(cfg.n_subjects) * cfg.trials_per_subject);

  const std::uint32_t T = cfg.trials_per_subject;
  const std::uint32_t first_half = (T + 1) / 2;
  const double omega = 2.0 * std::numbers::pi * cfg.carrier_hz / cfg.sample_rate_hz;
  std::vector<bool> in_a(cfg.n_channels, false), in_b(cfg.n_channels, false);
  for (auto c : cfg.set_a) in_a[c] = true;
  for (auto c : cfg.set_b) in_b[c] = true;

  Rng rng(cfg.seed);
  std::vector<std::uint8_t> labels(T);
  for (std::uint32_t s = 0; s < cfg.n_subjects; ++s) {
    for (std::uint32_t t = 0; t < T; ++t) labels[t] = t < T / 2 ? 0 : 1;
    rng.shuffle(std::span<std::uint8_t>(labels));

    for (std::uint32_t t = 0; t < T; ++t) {
      Trial trial;
      trial.subject_id = s;
      trial.chrono_index = t;
      trial.label = labels[t];
      trial.samples.resize(static_cast<std::size_t>(cfg.n_channels) * cfg.n_samples);

      const auto& active = t < first_half ? in_a : in_b;
      const double sign = trial.label == 1 ? 1.0 : -1.0;
      const double amp =
          cfg.base_amp + sign * cfg.contrast * (1.0 - cfg.decay * static_cast<double>(t) / (T - 1));

      for (std::uint32_t c = 0; c < cfg.n_channels; ++c) {
        float* dst = trial.samples.data() + static_cast<std::size_t>(c) * cfg.n_samples;
        const bool has_carrier = active[c];
        const double phase = has_carrier ? 2.0 * std::numbers::pi * rng.uniform() : 0.0;
        for (std::uint32_t n = 0; n < cfg.n_samples; ++n) {
          double v = cfg.noise_sigma > 0.0 ? cfg.noise_sigma * rng.normal() : 0.0;
          if (has_carrier) v += amp * std::sin(omega * n + phase);
          dst[n] = static_cast<float>(v);
        }
      }
      out.trials.push_back(std::move(trial));
    }
  }
  return out;
}

std::size_t container_size(std::size_t n_trials, std::size_t n_channels, std::size_t n_samples) {
  return kContainerHeaderBytes + n_trials * (kTrialHeaderBytes + 4 * n_channels * n_samples);
}

void encode_container(const RecordingSet& set,
                      const std::function<void(std::span<const std::byte>)>& sink) {
  validate(set);
  std::array<std::byte, kContainerHeaderBytes> header{};
  std::memcpy(header.data(), kMagic.data(), kMagic.size());
  put_u32(header.data() + 8, static_cast<std::uint32_t>(set.trials.size()));
  put_u32(header.data() + 12, set.n_channels);
  put_u32(header.data() + 16, set.n_samples);
  put_u32(header.data() + 20, std::bit_cast<std::uint32_t>(set.sample_rate_hz));
  sink(header);

  const std::size_t values = static_cast<std::size_t>(set.n_channels) * set.n_samples;
  std::vector<std::byte> record(kTrialHeaderBytes + 4 * values);
  for (const Trial& t : set.trials) {
    put_u32(record.data(), t.subject_id);
    put_u32(record.data() + 4, t.chrono_index);
    record[8] = static_cast<std::byte>(t.label);
    put_floats(record.data() + kTrialHeaderBytes, t.samples);
    sink(record);
  }
}

void write_container(const RecordingSet& set, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  encode_container(set, [&](std::span<const std::byte> chunk) {
    os.write(reinterpret_cast<const char*>(chunk.data()), static_cast<std::streamsize>(chunk.size()));
  });
  os.flush();
  if (!os) throw IoError("write failed: " + path.string());
}

namespace {

// Shared by the file and in-memory readers; `read(dst, n)` must copy n bytes.
template <class ReadFn>
RecordingSet decode_with(std::size_t total_bytes, ReadFn&& read, const std::string& origin) {
  if (total_bytes < kContainerHeaderBytes)
    throw FormatError(origin + ": truncated header: expected " + std::to_string(kContainerHeaderBytes) +
                      " bytes, got " + std::to_string(total_bytes));
  std::array<std::byte, kContainerHeaderBytes> header{};
  read(header.data(), header.size());
  if (std::memcmp(header.data(), kMagic.data(), kMagic.size()) != 0)
    throw FormatError(origin + ": bad magic (expected EEGBIN01)");

  RecordingSet set;
  const std::uint32_t n_trials = get_u32(header.data() + 8);
  set.n_channels = get_u32(header.data() + 12);
  set.n_samples = get_u32(header.data() + 16);
  set.sample_rate_hz = std::bit_cast<float>(get_u32(header.data() + 20));

  const std::size_t expected = container_size(n_trials, set.n_channels, set.n_samples);
  if (total_bytes != expected) {
    const char* what = total_bytes < expected ? "truncated payload" : "trailing bytes";
    throw FormatError(origin + ": " + what + ": expected " + std::to_string(expected) +
                      " bytes, got " + std::to_string(total_bytes));
  }

  const std::size_t values = static_cast<std::size_t>(set.n_channels) * set.n_samples;
  std::array<std::byte, kTrialHeaderBytes> th{};
  std::vector<std::byte> payload(4 * values);
  set.trials.resize(n_trials);
  for (Trial& t : set.trials) {
    read(th.data(), th.size());
    t.subject_id = get_u32(th.data());
    t.chrono_index = get_u32(th.data() + 4);
    t.label = static_cast<std::uint8_t>(th[8]);
    read(payload.data(), payload.size());
    t.samples.resize(values);
    get_floats(payload.data(), t.samples);
  }
  validate(set);
  return set;
}

}  // namespace

RecordingSet read_container(const std::filesystem::path& path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw IoError("cannot stat " + path.string() + ": " + ec.message());
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  auto read = [&](std::byte* dst, std::size_t n) {
    is.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (!is) throw IoError("read failed: " + path.string());
  };
  return decode_with(static_cast<std::size_t>(size), read, path.string());
}

RecordingSet decode_container(std::span<const std::byte> bytes) {
  std::size_t pos = 0;
  auto read = [&](std::byte* dst, std::size_t n) {
    std::memcpy(dst, bytes.data() + pos, n);
    pos += n;
  };
  return decode_with(bytes.size(), read, "<memory>");
}

std::uint64_t dataset_digest(const RecordingSet& set) {
  Fnv1a64 h;
  encode_container(set, [&](std::span<const std::byte> chunk) { h.update(chunk); });
  return h.value();
}

}  // namespace twoheads
