#include "pvq/features.h"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <thread>

#include "pvq/error.h"
#include "pvq/mfsc.h"
#include "pvq/voice_quality.h"

namespace pvq {

FeatureSet parse_feature_set(std::string_view name) {
  static constexpr std::pair<std::string_view, FeatureSet> kNames[] = {
      {"mfsc", FeatureSet::kMfsc},
      {"mfsc+pitch", FeatureSet::kMfscPitch},
      {"mfsc+pitch+jitter", FeatureSet::kMfscPitchJitter},
      {"mfsc+pitch+shimmer", FeatureSet::kMfscPitchShimmer},
      {"mfsc+pitch+jitter+shimmer", FeatureSet::kMfscPitchJitterShimmer},
      {"1", FeatureSet::kMfsc},
      {"2", FeatureSet::kMfscPitch},
      {"3", FeatureSet::kMfscPitchJitter},
      {"4", FeatureSet::kMfscPitchShimmer},
      {"5", FeatureSet::kMfscPitchJitterShimmer},
  };
  for (const auto& [n, set] : kNames) {
    if (n == name) return set;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown feature configuration '" + std::string(name) + "'");
}

std::string_view feature_set_name(FeatureSet set) {
  switch (set) {
    case FeatureSet::kMfsc: return "mfsc";
    case FeatureSet::kMfscPitch: return "mfsc+pitch";
    case FeatureSet::kMfscPitchJitter: return "mfsc+pitch+jitter";
    case FeatureSet::kMfscPitchShimmer: return "mfsc+pitch+shimmer";
    case FeatureSet::kMfscPitchJitterShimmer: return "mfsc+pitch+jitter+shimmer";
  }
  return "";
}

bool FeatureConfig::has_pitch() const { return set != FeatureSet::kMfsc; }

bool FeatureConfig::has_jitter() const {
  return set == FeatureSet::kMfscPitchJitter || set == FeatureSet::kMfscPitchJitterShimmer;
}

bool FeatureConfig::has_shimmer() const {
  return set == FeatureSet::kMfscPitchShimmer || set == FeatureSet::kMfscPitchJitterShimmer;
}

std::size_t FeatureConfig::dimension() const {
  return num_filters + (has_pitch() ? 3 : 0) + (has_jitter() ? 1 : 0) + (has_shimmer() ? 1 : 0);
}

void FeatureConfig::validate() const {
  if (num_filters < 1) throw Error(ErrorCode::kInvalidArgument, "num_filters must be >= 1");
  if (!(vq_window_s > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "vq_window_s must be positive");
  }
  if (has_pitch()) pitch.validate();
}

FeatureMatrix extract(const AudioBuffer& audio, const FeatureConfig& cfg) {
  cfg.validate();
  const MelFilterbank fb =
      build_filterbank(audio.sample_rate_hz, cfg.num_filters,
                       mfsc_fft_size(cfg.frame, audio.sample_rate_hz), cfg.low_hz, cfg.high_hz);
  const FeatureMatrix mfsc = compute_mfsc(audio, cfg.frame, fb);
  if (!cfg.has_pitch()) return mfsc;

  PitchConfig pitch_cfg = cfg.pitch;
  pitch_cfg.window_ms = cfg.frame.window_ms;
  pitch_cfg.stride_ms = cfg.frame.stride_ms;
  const PitchTrack track = extract_pitch(audio, pitch_cfg);
  const FeatureMatrix pitch = pitch_features(track);

  std::vector<VqMeasure> which;
  if (cfg.has_jitter()) which.push_back(VqMeasure::kJitterRel);
  if (cfg.has_shimmer()) which.push_back(VqMeasure::kShimmerRel);
  if (which.empty()) return hconcat({&mfsc, &pitch});

  const FeatureMatrix vq = extract_vq(audio, track, pitch_cfg, which, cfg.vq_window_s);
  return hconcat({&mfsc, &pitch, &vq});
}

std::vector<DatasetEntry> read_dataset_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, path.string() + ": cannot open list file");
  const std::filesystem::path base = path.parent_path();
  std::vector<DatasetEntry> entries;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::kFormat, path.string() + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
      const std::size_t tab = line.find('\t', start);
      if (tab == std::string::npos) break;
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    fields.push_back(line.substr(start));
    if (fields.size() < 3) fail("expected id, path, duration[, transcript] separated by tabs");
    DatasetEntry e;
    e.id = fields[0];
    if (e.id.empty()) fail("empty utterance id");
    if (!seen.insert(e.id).second) fail("duplicate utterance id '" + e.id + "'");
    e.audio_path = fields[1];
    if (e.audio_path.is_relative() && !base.empty()) e.audio_path = base / e.audio_path;
    char* end = nullptr;
    e.duration_s = std::strtod(fields[2].c_str(), &end);
    if (fields[2].empty() || end != fields[2].c_str() + fields[2].size()) {
      fail("bad duration '" + fields[2] + "'");
    }
    if (fields.size() > 3) e.transcript = fields[3];
    entries.push_back(std::move(e));
  }
  return entries;
}

BatchSummary batch_extract(const std::vector<DatasetEntry>& entries, const FeatureConfig& cfg,
                           const std::filesystem::path& out_dir, std::size_t jobs) {
  cfg.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIo, out_dir.string() + ": " + ec.message());

  std::vector<std::optional<std::string>> errors(entries.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      try {
        const AudioBuffer audio = load_wav(entries[i].audio_path);
        const FeatureMatrix m = extract(audio, cfg);
        write_matrix(m, out_dir / (entries[i].id + ".pft"), MatrixFormat::kBinary);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, entries.size()));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  BatchSummary summary;
  summary.total = entries.size();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (errors[i]) {
      summary.failures.push_back({entries[i].id, *errors[i]});
    } else {
      ++summary.succeeded;
    }
  }
  return summary;
}

}  // namespace pvq
