#ifndef PVQ_SYNTH_H_
#define PVQ_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pvq/audio.h"

namespace pvq {

enum class SynthKind { kSine, kChirp, kPulseTrain, kWhiteNoise, kSilence };

std::string_view synth_kind_name(SynthKind kind);
SynthKind parse_synth_kind(std::string_view name);

struct SynthSpec {
  SynthKind kind = SynthKind::kSine;
  double f0_start_hz = 100.0;
  double f0_end_hz = 100.0;  // chirp and pulse train sweep linearly to this
  double amplitude = 0.5;
  // Pulse train only: per-cycle gains and period multipliers, cycled.
  std::vector<double> amplitude_pattern{1.0};
  std::vector<double> period_pattern{1.0};
  double duration_s = 1.0;
  int sample_rate_hz = 16000;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrueCycle {
  double start_s = 0.0;
  double period_s = 0.0;
  double amplitude = 0.0;  // peak of the cycle's pulse
  double epoch_s = 0.0;    // time of that peak
};

struct GroundTruth {
  std::vector<TrueCycle> cycles;  // complete cycles only
  double f0_start_hz = 0.0;
  double f0_end_hz = 0.0;
  std::string noise_generator;  // empty unless kind is white noise

  /// Instantaneous f0 of sines and chirps at `time_s`.
  double f0_at(double time_s, double duration_s) const;
  std::vector<double> periods() const;
  std::vector<double> amplitudes() const;
};

struct SynthResult {
  AudioBuffer audio;
  GroundTruth truth;
};

/// Generates round(duration * sample_rate) samples.
///
/// Pulse trains are sums of raised-cosine pulses, one per cycle. Cycle i
/// begins at t_i (t_0 = 0, t_{i+1} = t_i + period_i), where period_i is the
/// reciprocal of the swept f0 at t_i times period_pattern[i % n]; its pulse
/// has width w_i = half the unperturbed period, peak amplitude *
/// amplitude_pattern[i % m], and is centred at t_i + w_i / 2. Timing is
/// accumulated in samples, so an integer period gives bitwise periodic output.
///
/// White noise is uniform in [-amplitude, amplitude): the top 53 bits of each
/// std::mt19937_64 draw (seeded with `seed`) scaled to [0, 1).
SynthResult synth(const SynthSpec& spec);

/// JSON sidecar with the SynthSpec fields and the ground truth.
std::string ground_truth_json(const SynthSpec& spec, const GroundTruth& truth);

}  // namespace pvq

#endif  // PVQ_SYNTH_H_
