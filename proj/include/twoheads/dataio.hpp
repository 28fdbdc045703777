#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace twoheads {

// One labelled trial. Samples are channel-major: channel c occupies
// samples[c * n_samples, (c + 1) * n_samples).
struct Trial {
  std::uint32_t subject_id = 0;
  std::uint32_t chrono_index = 0;
  std::uint8_t label = 0;  // 0 = left, 1 = right
  std::vector<float> samples;

  std::span<const float> channel(std::size_t c, std::size_t n_samples) const {
    return std::span<const float>(samples).subspan(c * n_samples, n_samples);
  }

  bool operator==(const Trial&) const = default;
};

struct RecordingSet {
  std::uint32_t n_channels = 129;
  std::uint32_t n_samples = 500;
  float sample_rate_hz = 500.0f;
  std::vector<Trial> trials;

  std::size_t n_trials() const { return trials.size(); }
  std::size_t n_subjects() const;
};

// Field-for-field equality that compares sample bit patterns, not values.
bool bitwise_equal(const RecordingSet& a, const RecordingSet& b);

// Throws ValidationError naming the first offending trial or field.
void validate(const RecordingSet& set);

struct GeneratorConfig {
  std::uint32_t n_subjects = 30;
  std::uint32_t trials_per_subject = 120;
  std::uint32_t n_channels = 129;
  std::uint32_t n_samples = 500;
  double sample_rate_hz = 500.0;
  std::uint64_t seed = 42;
  double noise_sigma = 1.0;
  double carrier_hz = 10.0;
  double base_amp = 1.0;
  double contrast = 0.6;
  double decay = 0.5;
  std::vector<std::uint32_t> set_a = {0, 1, 2, 3, 4, 5, 6, 7};
  std::vector<std::uint32_t> set_b = {64, 65, 66, 67, 68, 69, 70, 71};

  // Throws ConfigError naming the violated field.
  void validate() const;
};

// Nonstationary two-class surrogate: discriminative alpha-band channels are
// set_a during the first ceil(T/2) trials of each subject and set_b after,
// with the label contrast decaying linearly over the session.
RecordingSet generate_synthetic(const GeneratorConfig& cfg);

// EEGB container (little-endian, no padding):
//   "EEGBIN01" | n_trials u32 | n_channels u32 | n_samples u32 | rate f32
//   then per trial: subject u32 | chrono u32 | label u8 | f32 samples.
inline constexpr std::size_t kContainerHeaderBytes = 24;
inline constexpr std::size_t kTrialHeaderBytes = 9;

std::size_t container_size(std::size_t n_trials, std::size_t n_channels, std::size_t n_samples);

// Streams the serialized bytes to `sink` in chunks (header, then one chunk
// per trial).
void encode_container(const RecordingSet& set,
                      const std::function<void(std::span<const std::byte>)>& sink);

void write_container(const RecordingSet& set, const std::filesystem::path& path);
RecordingSet read_container(const std::filesystem::path& path);
RecordingSet decode_container(std::span<const std::byte> bytes);

class Fnv1a64 {
 public:
  void update(std::span<const std::byte> bytes) {
    for (std::byte b : bytes) {
      hash_ ^= static_cast<std::uint64_t>(b);
      hash_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

// FNV-1a over the EEGB byte stream of `set`.
std::uint64_t dataset_digest(const RecordingSet& set);

}  // namespace twoheads
