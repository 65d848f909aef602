#ifndef PVQ_VOICE_QUALITY_H_
#define PVQ_VOICE_QUALITY_H_

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "pvq/audio.h"
#include "pvq/feature_matrix.h"
#include "pvq/pitch.h"

namespace pvq {

/// One glottal cycle. `start_s` is the cycle's epoch (the waveform peak the
/// cycle is anchored on) and the next cycle starts at start_s + period_s.
/// `amplitude` is max - min of the samples between the minima on either side
/// of the epoch.
struct Cycle {
  double start_s = 0.0;
  double period_s = 0.0;
  double amplitude = 0.0;
  double pov = 0.0;  // POV feature of the frame covering the epoch
  bool voiced = false;
};

struct PeriodMarks {
  std::vector<Cycle> cycles;
};

/// Pitch-synchronous epoch marking. Starting from the largest sample of the
/// first expected period, each next epoch is the largest sample within
/// [0.8, 1.2] of the period predicted by the pitch track at the current
/// epoch (kept inside the configured f0 range), refined to sub-sample
/// precision by parabolic interpolation. A cycle is voiced when the POV of
/// its frame reaches cfg.pov_threshold and both of its epochs are strict local
/// maxima. Returns no cycles when none is voiced.
PeriodMarks mark_periods(const AudioBuffer& audio, const PitchTrack& track,
                         const PitchConfig& cfg);

/// Mean absolute difference between consecutive periods, in the unit of the
/// input. Empty when fewer than two periods are given.
std::optional<double> jitter_absolute(std::span<const double> periods);

/// jitter_absolute / mean period * 100.
std::optional<double> jitter_relative(std::span<const double> periods);

/// Mean |20 log10(A[i+1] / A[i])| over consecutive positive amplitudes;
/// non-positive amplitudes are dropped first.
std::optional<double> shimmer_db(std::span<const double> amplitudes);

/// Mean |A[i+1] - A[i]| / mean(A) * 100.
std::optional<double> shimmer_relative(std::span<const double> amplitudes);

enum class VqMeasure { kJitterAbs, kJitterRel, kShimmerDb, kShimmerRel };

std::string_view vq_measure_name(VqMeasure m);
std::optional<VqMeasure> parse_vq_measure(std::string_view name);

struct VoiceQualityFrame {
  double jitter_abs_s = 0.0;
  double jitter_rel_pct = 0.0;
  double shimmer_db = 0.0;
  double shimmer_rel_pct = 0.0;

  double get(VqMeasure m) const;
};

/// For every frame, the four measures over the voiced cycles whose epoch lies
/// in the window of `window_s` centered on the frame (clipped at the
/// utterance edges). Consecutive-cycle differences are taken only between
/// cycles adjacent in the marking, so an unvoiced gap never contributes a
/// difference. Frames with fewer than two voiced cycles, or no adjacent pair,
/// get zeros.
std::vector<VoiceQualityFrame> voice_quality_track(const PeriodMarks& marks,
                                                   const FrameLayout& layout,
                                                   double window_s = 0.5);

FeatureMatrix extract_vq(const AudioBuffer& audio, const PitchTrack& track,
                         const PitchConfig& cfg, std::span<const VqMeasure> which,
                         double window_s = 0.5);

/// start_s,period_s,amplitude,pov,voiced
void write_cycles_csv(const PeriodMarks& marks, std::ostream& out);

}  // namespace pvq

#endif  // PVQ_VOICE_QUALITY_H_
