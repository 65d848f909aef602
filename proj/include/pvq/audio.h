#ifndef PVQ_AUDIO_H_
#define PVQ_AUDIO_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "pvq/matrix.h"

namespace pvq {

/// Mono audio with samples nominally in [-1, 1].
struct AudioBuffer {
  std::vector<float> samples;
  int sample_rate_hz = 16000;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

/// Reads a RIFF/WAVE file holding 16-bit PCM or 32-bit float samples with one
/// or two channels. Stereo is averaged to mono, PCM is scaled by 1/32768 and
/// float samples are clamped to [-1, 1]. Errors carry the byte offset of the
/// offending chunk.
AudioBuffer load_wav(const std::filesystem::path& path);

enum class WavEncoding { kPcm16, kFloat32 };

void write_wav(const AudioBuffer& audio, const std::filesystem::path& path,
               WavEncoding encoding = WavEncoding::kFloat32);

/// Band-limited resampler using a Hann-windowed sinc kernel. The filter
/// weights depend only on the phase of each output sample, and the phase
/// pattern repeats every target/gcd(source, target) outputs, so weights are
/// tabulated once per rate pair.
class Resampler {
 public:
  Resampler(int source_hz, int target_hz, int num_zeros = 6);

  std::vector<float> operator()(std::span<const float> input) const;

  /// round(n * target / source)
  std::size_t output_length(std::size_t input_length) const;

 private:
  int source_hz_;
  int target_hz_;
  long input_step_;   // input samples per phase block
  long output_step_;  // output samples per phase block
  std::vector<long> first_index_;
  std::vector<std::vector<float>> weights_;
};

/// Identity (bitwise copy) when the rates already match.
AudioBuffer resample(const AudioBuffer& audio, int target_hz);

enum class WindowType { kHamming, kHanning, kRectangular };

struct FrameSpec {
  double window_ms = 25.0;
  double stride_ms = 10.0;
  WindowType window = WindowType::kHamming;
  double preemphasis = 0.97;

  std::size_t window_samples(int sample_rate_hz) const;
  std::size_t stride_samples(int sample_rate_hz) const;

  /// floor((n - window) / stride) + 1, or 0 when n < window.
  std::size_t num_frames(std::size_t num_samples, int sample_rate_hz) const;

  /// Throws kInvalidArgument on a malformed spec.
  void validate(int sample_rate_hz) const;
};

std::vector<double> make_window(WindowType type, std::size_t length);

/// One row per frame: the raw slice, preemphasized in place
/// (x[n] -= k * x[n-1], with x[-1] taken as x[0]) and then windowed.
/// Throws kTooShort when the buffer is shorter than one window.
Matrix<double> frame_signal(const AudioBuffer& audio, const FrameSpec& spec);

}  // namespace pvq

#endif  // PVQ_AUDIO_H_
