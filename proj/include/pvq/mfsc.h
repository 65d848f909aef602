#ifndef PVQ_MFSC_H_
#define PVQ_MFSC_H_

#include <cstddef>
#include <span>
#include <vector>

#include "pvq/audio.h"
#include "pvq/feature_matrix.h"
#include "pvq/fft.h"
#include "pvq/matrix.h"

namespace pvq {

/// Energies below this are clamped before the log, so silence maps to
/// log(1e-10) instead of -inf.
inline constexpr double kLogEnergyFloor = 1e-10;

/// HTK mel scale, 1127 ln(1 + f/700).
double mel_scale(double hz);
double inverse_mel_scale(double mel);

struct MelFilter {
  std::size_t first_bin = 0;
  std::vector<double> weights;  // strictly positive, over bins first_bin..
  double center_hz = 0.0;
};

struct MelFilterbank {
  int sample_rate_hz = 0;
  std::size_t fft_size = 0;
  double low_hz = 0.0;
  double high_hz = 0.0;
  std::vector<MelFilter> filters;

  std::size_t size() const { return filters.size(); }
};

/// Triangular filters with centers equally spaced in mel between mel(low_hz)
/// and mel(high_hz); each triangle peaks at 1 on its center and reaches 0 on
/// the neighbouring centers. A negative high_hz means Nyquist.
MelFilterbank build_filterbank(int sample_rate_hz, std::size_t num_filters,
                               std::size_t fft_size, double low_hz = 0.0,
                               double high_hz = -1.0);

/// Owns the FFT plan for one (frame spec, filterbank) pair.
class MfscExtractor {
 public:
  MfscExtractor(const FrameSpec& spec, MelFilterbank filterbank);

  const MelFilterbank& filterbank() const { return filterbank_; }

  /// Filterbank energies of one already windowed frame.
  std::vector<double> energies(std::span<const double> frame) const;

  /// Natural-log filterbank energies with the floor applied, in double
  /// precision. One row per frame of frame_signal().
  Matrix<double> log_energies(const AudioBuffer& audio) const;

  FeatureMatrix compute(const AudioBuffer& audio) const;

 private:
  FrameSpec spec_;
  MelFilterbank filterbank_;
  Fft fft_;
};

/// fft size used for a FrameSpec at a given rate: smallest power of two
/// holding one window.
std::size_t mfsc_fft_size(const FrameSpec& spec, int sample_rate_hz);

FeatureMatrix compute_mfsc(const AudioBuffer& audio, const FrameSpec& spec,
                           const MelFilterbank& filterbank);

std::vector<std::string> mfsc_column_names(std::size_t num_filters);

}  // namespace pvq

#endif  // PVQ_MFSC_H_
