#include "pvq/audio.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include "pvq/error.h"

namespace pvq {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const std::vector<unsigned char>& b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t read_u32(const std::vector<unsigned char>& b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) |
         (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) |
         (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

[[noreturn]] void wav_error(const std::filesystem::path& path, std::size_t offset,
                            const std::string& what) {
  std::ostringstream msg;
  msg << path.string() << ": " << what << " at byte offset " << offset;
  throw Error(ErrorCode::kFormat, msg.str());
}

struct WavFormat {
  std::uint16_t code = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

// Hann-windowed ideal low-pass impulse response, time in seconds.
double windowed_sinc(double t, double cutoff_hz, double half_width_s) {
  if (std::abs(t) >= half_width_s) return 0.0;
  const double window = 0.5 * (1.0 + std::cos(std::numbers::pi * t / half_width_s));
  const double sinc = t == 0.0 ? 2.0 * cutoff_hz
                               : std::sin(2.0 * std::numbers::pi * cutoff_hz * t) /
                                     (std::numbers::pi * t);
  return window * sinc;
}

}  // namespace

AudioBuffer load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, path.string() + ": cannot open file");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());

  if (bytes.size() < 12) wav_error(path, 0, "truncated RIFF header");
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    wav_error(path, 0, "not a RIFF/WAVE file");
  }

  WavFormat fmt;
  bool have_fmt = false;
  std::size_t offset = 12;
  while (true) {
    if (offset + 8 > bytes.size()) {
      wav_error(path, offset, "missing data chunk (truncated chunk header)");
    }
    const std::string id(reinterpret_cast<const char*>(bytes.data() + offset), 4);
    const std::size_t size = read_u32(bytes, offset + 4);
    const std::size_t body = offset + 8;
    if (body + size > bytes.size()) {
      wav_error(path, offset, "truncated '" + id + "' chunk");
    }

    if (id == "fmt ") {
      if (size < 16) wav_error(path, offset, "fmt chunk too small");
      fmt.code = read_u16(bytes, body);
      fmt.channels = read_u16(bytes, body + 2);
      fmt.sample_rate = read_u32(bytes, body + 4);
      fmt.block_align = read_u16(bytes, body + 12);
      fmt.bits = read_u16(bytes, body + 14);
      if (fmt.code == kFormatExtensible) {
        if (size < 40) wav_error(path, offset, "extensible fmt chunk too small");
        fmt.code = read_u16(bytes, body + 24);
      }
      const bool pcm16 = fmt.code == kFormatPcm && fmt.bits == 16;
      const bool float32 = fmt.code == kFormatFloat && fmt.bits == 32;
      if (!pcm16 && !float32) {
        wav_error(path, offset,
                  "unsupported codec (format " + std::to_string(fmt.code) + ", " +
                      std::to_string(fmt.bits) + " bits)");
      }
      if (fmt.channels < 1 || fmt.channels > 2) {
        wav_error(path, offset,
                  "unsupported channel count " + std::to_string(fmt.channels));
      }
      if (fmt.sample_rate == 0) wav_error(path, offset, "zero sample rate");
      if (fmt.block_align != fmt.channels * fmt.bits / 8) {
        wav_error(path, offset, "inconsistent block alignment");
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) wav_error(path, offset, "data chunk before fmt chunk");
      if (size % fmt.block_align != 0) {
        wav_error(path, offset, "data chunk ends inside a sample frame");
      }
      const std::size_t frames = size / fmt.block_align;
      AudioBuffer audio;
      audio.sample_rate_hz = static_cast<int>(fmt.sample_rate);
      audio.samples.resize(frames);
      for (std::size_t i = 0; i < frames; ++i) {
        float acc = 0.0f;
        for (std::size_t c = 0; c < fmt.channels; ++c) {
          const std::size_t at = body + i * fmt.block_align + c * (fmt.bits / 8);
          float v;
          if (fmt.code == kFormatPcm) {
            v = static_cast<float>(static_cast<std::int16_t>(read_u16(bytes, at))) /
                32768.0f;
          } else {
            const std::uint32_t raw = read_u32(bytes, at);
            std::memcpy(&v, &raw, sizeof v);
            if (!std::isfinite(v)) wav_error(path, at, "non-finite float sample");
            v = std::clamp(v, -1.0f, 1.0f);
          }
          acc += v;
        }
        audio.samples[i] = fmt.channels == 2 ? acc * 0.5f : acc;
      }
      return audio;
    }
    offset = body + size + (size & 1);
  }
}

void write_wav(const AudioBuffer& audio, const std::filesystem::path& path,
               WavEncoding encoding) {
  const std::uint16_t bits = encoding == WavEncoding::kPcm16 ? 16 : 32;
  const std::uint16_t block = bits / 8;
  const std::uint32_t data_size = static_cast<std::uint32_t>(audio.samples.size() * block);

  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  put_u32(out, 36 + data_size);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, encoding == WavEncoding::kPcm16 ? kFormatPcm : kFormatFloat);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(audio.sample_rate_hz));
  put_u32(out, static_cast<std::uint32_t>(audio.sample_rate_hz) * block);
  put_u16(out, block);
  put_u16(out, bits);
  out += "data";
  put_u32(out, data_size);
  for (float s : audio.samples) {
    if (encoding == WavEncoding::kPcm16) {
      const long q = std::lround(static_cast<double>(s) * 32768.0);
      put_u16(out, static_cast<std::uint16_t>(
                       static_cast<std::int16_t>(std::clamp(q, -32768L, 32767L))));
    } else {
      std::uint32_t raw;
      std::memcpy(&raw, &s, sizeof raw);
      put_u32(out, raw);
    }
  }

  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kIo, path.string() + ": cannot open for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(ErrorCode::kIo, path.string() + ": write failed");
}

Resampler::Resampler(int source_hz, int target_hz, int num_zeros)
    : source_hz_(source_hz), target_hz_(target_hz) {
  if (source_hz <= 0 || target_hz <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "resample: sample rates must be positive");
  }
  if (num_zeros < 1) throw Error(ErrorCode::kInvalidArgument, "resample: num_zeros < 1");
  const long g = std::gcd(source_hz, target_hz);
  input_step_ = source_hz / g;
  output_step_ = target_hz / g;

  const double cutoff = 0.99 * 0.5 * std::min(source_hz, target_hz);
  const double half_width = num_zeros / (2.0 * cutoff);
  first_index_.resize(output_step_);
  weights_.resize(output_step_);
  for (long r = 0; r < output_step_; ++r) {
    const double center = static_cast<double>(r) * source_hz / target_hz;
    const long first = static_cast<long>(std::ceil(center - half_width * source_hz));
    const long last = static_cast<long>(std::floor(center + half_width * source_hz));
    first_index_[r] = first;
    auto& w = weights_[r];
    w.resize(static_cast<std::size_t>(last - first + 1));
    for (long n = first; n <= last; ++n) {
      // Exact integer numerator keeps phases reproducible.
      const double dt = static_cast<double>(n * target_hz - r * source_hz) /
                        (static_cast<double>(source_hz) * target_hz);
      w[static_cast<std::size_t>(n - first)] =
          static_cast<float>(windowed_sinc(dt, cutoff, half_width) / source_hz);
    }
  }
}

std::size_t Resampler::output_length(std::size_t input_length) const {
  const unsigned long long num =
      static_cast<unsigned long long>(input_length) * target_hz_ + source_hz_ / 2;
  return static_cast<std::size_t>(num / source_hz_);
}

std::vector<float> Resampler::operator()(std::span<const float> input) const {
  const std::size_t out_len = output_length(input.size());
  const long n_in = static_cast<long>(input.size());
  std::vector<float> out(out_len);
  for (std::size_t m = 0; m < out_len; ++m) {
    const long block = static_cast<long>(m) / output_step_;
    const long phase = static_cast<long>(m) % output_step_;
    const auto& w = weights_[phase];
    const long base = block * input_step_ + first_index_[phase];
    const long taps = static_cast<long>(w.size());
    double acc = 0.0;
    if (base >= 0 && base + taps <= n_in) {
      const float* x = input.data() + base;
      for (long j = 0; j < taps; ++j) acc += static_cast<double>(w[j]) * x[j];
    } else {
      for (long j = 0; j < taps; ++j) {
        const long i = base + j;
        if (i >= 0 && i < n_in) acc += static_cast<double>(w[j]) * input[i];
      }
    }
    out[m] = static_cast<float>(acc);
  }
  return out;
}

AudioBuffer resample(const AudioBuffer& audio, int target_hz) {
  if (target_hz <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "resample: target rate must be positive");
  }
  if (target_hz == audio.sample_rate_hz) return audio;
  Resampler resampler(audio.sample_rate_hz, target_hz);
  return AudioBuffer{resampler(audio.samples), target_hz};
}

std::size_t FrameSpec::window_samples(int sample_rate_hz) const {
  return static_cast<std::size_t>(std::llround(window_ms * sample_rate_hz / 1000.0));
}

std::size_t FrameSpec::stride_samples(int sample_rate_hz) const {
  return static_cast<std::size_t>(std::llround(stride_ms * sample_rate_hz / 1000.0));
}

std::size_t FrameSpec::num_frames(std::size_t num_samples, int sample_rate_hz) const {
  const std::size_t window = window_samples(sample_rate_hz);
  if (num_samples < window) return 0;
  return (num_samples - window) / stride_samples(sample_rate_hz) + 1;
}

void FrameSpec::validate(int sample_rate_hz) const {
  if (sample_rate_hz <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "framing: sample rate must be positive");
  }
  if (!(stride_ms > 0.0) || !(stride_ms <= window_ms)) {
    throw Error(ErrorCode::kInvalidArgument,
                "framing: need 0 < stride_ms <= window_ms");
  }
  if (window_samples(sample_rate_hz) < 2) {
    throw Error(ErrorCode::kInvalidArgument, "framing: window shorter than 2 samples");
  }
  if (stride_samples(sample_rate_hz) < 1) {
    throw Error(ErrorCode::kInvalidArgument, "framing: stride rounds to 0 samples");
  }
  if (!(preemphasis >= 0.0 && preemphasis < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "framing: preemphasis must be in [0, 1)");
  }
}

std::vector<double> make_window(WindowType type, std::size_t length) {
  std::vector<double> w(length, 1.0);
  if (length < 2 || type == WindowType::kRectangular) return w;
  const double denom = static_cast<double>(length - 1);
  for (std::size_t n = 0; n < length; ++n) {
    const double c = std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / denom);
    w[n] = type == WindowType::kHamming ? 0.54 - 0.46 * c : 0.5 - 0.5 * c;
  }
  return w;
}

Matrix<double> frame_signal(const AudioBuffer& audio, const FrameSpec& spec) {
  spec.validate(audio.sample_rate_hz);
  const std::size_t window = spec.window_samples(audio.sample_rate_hz);
  const std::size_t stride = spec.stride_samples(audio.sample_rate_hz);
  if (audio.size() < window) {
    throw Error(ErrorCode::kTooShort,
                "signal of " + std::to_string(audio.size()) +
                    " samples is shorter than one " + std::to_string(window) +
                    "-sample window");
  }
  const std::size_t num_frames = (audio.size() - window) / stride + 1;
  const std::vector<double> win = make_window(spec.window, window);

  Matrix<double> frames(num_frames, window);
  for (std::size_t t = 0; t < num_frames; ++t) {
    auto frame = frames.row(t);
    const float* src = audio.samples.data() + t * stride;
    for (std::size_t n = 0; n < window; ++n) frame[n] = src[n];
    if (spec.preemphasis != 0.0) {
      for (std::size_t n = window - 1; n > 0; --n) frame[n] -= spec.preemphasis * frame[n - 1];
      frame[0] -= spec.preemphasis * frame[0];
    }
    for (std::size_t n = 0; n < window; ++n) frame[n] *= win[n];
  }
  return frames;
}

}  // namespace pvq
