#ifndef PVQ_PITCH_H_
#define PVQ_PITCH_H_

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "pvq/audio.h"
#include "pvq/feature_matrix.h"
#include "pvq/matrix.h"

namespace pvq {

struct PitchConfig {
  double min_f0_hz = 50.0;
  double max_f0_hz = 400.0;
  int internal_sr_hz = 4000;
  double window_ms = 25.0;
  double stride_ms = 10.0;
  double penalty_factor = 0.1;
  // Added to the first segment energy, in units of int16-scaled samples and
  // per second of window: ballast * window_samples / internal_sr / 32768^2.
  double nccf_ballast = 7000.0;
  // NCCF values entering the Viterbi search are weighted by
  // (1 - soft_min_f0_hz * lag_seconds), which breaks the tie between a
  // period and its multiples in favour of the shortest.
  double soft_min_f0_hz = 10.0;
  // Step of the log-spaced lag grid the integer-lag NCCF is interpolated
  // onto. 0 searches integer lags only.
  double lag_resolution = 0.005;
  int upsample_filter_width = 5;
  // POV feature value at and above which a frame counts as voiced.
  double pov_threshold = 0.37;

  void validate() const;

  FrameSpec frame_spec() const;
};

/// Computes nccf(l) = sum_n x[n] x[n+l] / sqrt((e0 + ballast) * e_l) for
/// l = min_lag..max_lag, where n runs over the first `window` samples and
/// e0, e_l are the energies of the two aligned segments. A zero denominator
/// yields 0. Values are clamped to [-1, 1]. `segment` must hold at least
/// window + max_lag samples.
std::vector<double> compute_nccf(std::span<const double> segment, std::size_t window,
                                 int min_lag, int max_lag, double ballast);

struct ViterbiResult {
  std::vector<std::size_t> path;  // column index per frame
  double score = 0.0;
};

/// Maximizes sum_t table(t, k_t) - penalty * (ln(lags[k_t] / lags[k_{t-1}]))^2.
/// `lags` must be positive and strictly increasing; ties go to the smaller
/// lag. The penalty is a convex function of the log-lag difference, so the
/// best predecessor index is nondecreasing in the current index and each
/// frame is solved by divide and conquer in O(L log L).
ViterbiResult viterbi_lags(const Matrix<double>& table, std::span<const double> lags,
                           double penalty_factor);

/// 2 * ((1.0001 - c)^-0.15 - 1) with c clamped to [-1, 1]; strictly
/// increasing and finite over the whole range.
double nccf_to_pov_feature(double nccf);

/// Frame geometry at the original sample rate, shared by every extractor.
struct FrameLayout {
  int sample_rate_hz = 0;
  std::size_t window_samples = 0;
  std::size_t stride_samples = 0;
  std::size_t num_frames = 0;

  static FrameLayout from(const FrameSpec& spec, std::size_t num_samples,
                          int sample_rate_hz);

  double center_s(std::size_t t) const;
  /// Frame whose center is nearest to `time_s`, clamped to the valid range.
  std::size_t frame_at(double time_s) const;
};

struct PitchFrame {
  double pov = 0.0;
  double log_pitch = 0.0;
  double delta_pitch = 0.0;
  double lag = 0.0;   // samples at the internal rate; fractional on a refined grid
  double nccf = 0.0;  // unweighted NCCF at the chosen lag

  double f0_hz(int internal_sr_hz) const { return internal_sr_hz / lag; }
};

struct PitchTrack {
  FrameLayout layout;
  int internal_sr_hz = 0;
  std::vector<PitchFrame> frames;

  std::size_t size() const { return frames.size(); }
};

/// Lag values searched by extract_pitch for a config.
std::vector<double> pitch_lag_grid(const PitchConfig& cfg);

PitchTrack extract_pitch(const AudioBuffer& audio, const PitchConfig& cfg);

/// Columns pov, log_pitch, delta_pitch.
FeatureMatrix pitch_features(const PitchTrack& track);

/// frame,time_s,lag,nccf,f0_hz,pov,log_pitch,delta_pitch
void write_pitch_csv(const PitchTrack& track, std::ostream& out);

}  // namespace pvq

#endif  // PVQ_PITCH_H_
