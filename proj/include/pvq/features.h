#ifndef PVQ_FEATURES_H_
#define PVQ_FEATURES_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pvq/audio.h"
#include "pvq/feature_matrix.h"
#include "pvq/pitch.h"

namespace pvq {

/// The five feature configurations. Columns always come in the order
/// mfsc_*, pov, log_pitch, delta_pitch, jitter_rel, shimmer_rel.
enum class FeatureSet {
  kMfsc,                    // 40
  kMfscPitch,               // 43
  kMfscPitchJitter,         // 44
  kMfscPitchShimmer,        // 44
  kMfscPitchJitterShimmer,  // 45
};

/// Accepts "mfsc", "mfsc+pitch", "mfsc+pitch+jitter", "mfsc+pitch+shimmer",
/// "mfsc+pitch+jitter+shimmer" (also 1..5).
FeatureSet parse_feature_set(std::string_view name);
std::string_view feature_set_name(FeatureSet set);

struct FeatureConfig {
  FeatureSet set = FeatureSet::kMfsc;
  FrameSpec frame;  // also drives the pitch and voice-quality framing
  std::size_t num_filters = 40;
  double low_hz = 0.0;
  double high_hz = -1.0;  // negative: Nyquist
  PitchConfig pitch;
  double vq_window_s = 0.5;

  std::size_t dimension() const;
  bool has_pitch() const;
  bool has_jitter() const;
  bool has_shimmer() const;
  void validate() const;
};

/// MFSC, pitch and voice-quality streams concatenated per the configuration.
/// A frame-count disagreement between streams is a kInternal error.
FeatureMatrix extract(const AudioBuffer& audio, const FeatureConfig& cfg);

struct DatasetEntry {
  std::string id;
  std::filesystem::path audio_path;
  double duration_s = 0.0;
  std::string transcript;
};

/// One entry per line: id, audio path, duration, transcript, tab separated.
/// Relative audio paths are taken relative to the list file's directory.
/// Blank lines and lines starting with '#' are skipped; ids must be unique.
std::vector<DatasetEntry> read_dataset_list(const std::filesystem::path& path);

struct BatchFailure {
  std::string id;
  std::string reason;
};

struct BatchSummary {
  std::size_t total = 0;
  std::size_t succeeded = 0;
  std::vector<BatchFailure> failures;  // in list order
};

/// Writes <out_dir>/<id>.pft for every entry using `jobs` worker threads.
/// Per-entry errors are collected, never fatal; outputs do not depend on
/// `jobs` or scheduling.
BatchSummary batch_extract(const std::vector<DatasetEntry>& entries, const FeatureConfig& cfg,
                           const std::filesystem::path& out_dir, std::size_t jobs);

}  // namespace pvq

#endif  // PVQ_FEATURES_H_
