#include "pvq/mfsc.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "pvq/error.h"

namespace pvq {

double mel_scale(double hz) {
  if (!(hz >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "mel_scale: negative frequency");
  }
  return 1127.0 * std::log1p(hz / 700.0);
}

double inverse_mel_scale(double mel) { return 700.0 * std::expm1(mel / 1127.0); }

MelFilterbank build_filterbank(int sample_rate_hz, std::size_t num_filters,
                               std::size_t fft_size, double low_hz, double high_hz) {
  if (sample_rate_hz <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "filterbank: sample rate must be positive");
  }
  const double nyquist = 0.5 * sample_rate_hz;
  if (high_hz < 0.0) high_hz = nyquist;
  if (!(low_hz >= 0.0 && low_hz < high_hz && high_hz <= nyquist)) {
    throw Error(ErrorCode::kInvalidArgument,
                "filterbank: need 0 <= low_hz < high_hz <= sample_rate/2");
  }
  if (num_filters < 1) throw Error(ErrorCode::kInvalidArgument, "filterbank: no filters");
  if (!is_power_of_two(fft_size)) {
    throw Error(ErrorCode::kInvalidArgument, "filterbank: fft size must be a power of two");
  }
  if (fft_size < 2 * num_filters) {
    throw Error(ErrorCode::kInvalidArgument,
                "filterbank: " + std::to_string(fft_size) + "-point FFT is too small for " +
                    std::to_string(num_filters) + " filters");
  }

  MelFilterbank fb;
  fb.sample_rate_hz = sample_rate_hz;
  fb.fft_size = fft_size;
  fb.low_hz = low_hz;
  fb.high_hz = high_hz;

  const double mel_low = mel_scale(low_hz);
  const double mel_high = mel_scale(high_hz);
  const double spacing = (mel_high - mel_low) / static_cast<double>(num_filters + 1);
  const std::size_t num_bins = fft_size / 2 + 1;
  std::vector<double> bin_mel(num_bins);
  for (std::size_t k = 0; k < num_bins; ++k) {
    bin_mel[k] = mel_scale(static_cast<double>(k) * sample_rate_hz / fft_size);
  }

  for (std::size_t i = 0; i < num_filters; ++i) {
    const double left = mel_low + spacing * static_cast<double>(i);
    const double center = mel_low + spacing * static_cast<double>(i + 1);
    const double right = mel_low + spacing * static_cast<double>(i + 2);
    MelFilter filter;
    filter.center_hz = inverse_mel_scale(center);
    for (std::size_t k = 0; k < num_bins; ++k) {
      const double m = bin_mel[k];
      double w = 0.0;
      if (m > left && m <= center) {
        w = (m - left) / (center - left);
      } else if (m > center && m < right) {
        w = (right - m) / (right - center);
      }
      if (w <= 0.0) continue;
      // Positive bins of one triangle are contiguous.
      if (filter.weights.empty()) filter.first_bin = k;
      filter.weights.push_back(w);
    }
    if (filter.weights.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "filterbank: filter " + std::to_string(i) + " covers no FFT bin; use a "
                  "larger FFT or fewer filters");
    }
    fb.filters.push_back(std::move(filter));
  }
  return fb;
}

std::size_t mfsc_fft_size(const FrameSpec& spec, int sample_rate_hz) {
  return next_power_of_two(spec.window_samples(sample_rate_hz));
}

MfscExtractor::MfscExtractor(const FrameSpec& spec, MelFilterbank filterbank)
    : spec_(spec), filterbank_(std::move(filterbank)), fft_(filterbank_.fft_size) {}

std::vector<double> MfscExtractor::energies(std::span<const double> frame) const {
  Fft::Scratch scratch;
  std::vector<double> power(fft_.size() / 2 + 1);
  fft_.power_spectrum(frame, power, scratch);
  std::vector<double> out(filterbank_.size());
  for (std::size_t i = 0; i < filterbank_.size(); ++i) {
    const auto& f = filterbank_.filters[i];
    double e = 0.0;
    for (std::size_t j = 0; j < f.weights.size(); ++j) e += f.weights[j] * power[f.first_bin + j];
    out[i] = e;
  }
  return out;
}

Matrix<double> MfscExtractor::log_energies(const AudioBuffer& audio) const {
  if (audio.sample_rate_hz != filterbank_.sample_rate_hz) {
    throw Error(ErrorCode::kInvalidArgument,
                "mfsc: filterbank built for " + std::to_string(filterbank_.sample_rate_hz) +
                    " Hz applied to " + std::to_string(audio.sample_rate_hz) + " Hz audio");
  }
  if (spec_.window_samples(audio.sample_rate_hz) > fft_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "mfsc: window longer than the FFT");
  }
  const Matrix<double> frames = frame_signal(audio, spec_);
  Matrix<double> out(frames.rows(), filterbank_.size());
  Fft::Scratch scratch;
  std::vector<double> power(fft_.size() / 2 + 1);
  for (std::size_t t = 0; t < frames.rows(); ++t) {
    fft_.power_spectrum(frames.row(t), power, scratch);
    auto row = out.row(t);
    for (std::size_t i = 0; i < filterbank_.size(); ++i) {
      const auto& f = filterbank_.filters[i];
      double e = 0.0;
      for (std::size_t j = 0; j < f.weights.size(); ++j) {
        e += f.weights[j] * power[f.first_bin + j];
      }
      row[i] = std::log(std::max(e, kLogEnergyFloor));
    }
  }
  return out;
}

FeatureMatrix MfscExtractor::compute(const AudioBuffer& audio) const {
  const Matrix<double> logs = log_energies(audio);
  FeatureMatrix m;
  m.values = Matrix<float>(logs.rows(), logs.cols());
  std::transform(logs.data().begin(), logs.data().end(), m.values.data().begin(),
                 [](double v) { return static_cast<float>(v); });
  m.columns = mfsc_column_names(logs.cols());
  return m;
}

FeatureMatrix compute_mfsc(const AudioBuffer& audio, const FrameSpec& spec,
                           const MelFilterbank& filterbank) {
  return MfscExtractor(spec, filterbank).compute(audio);
}

std::vector<std::string> mfsc_column_names(std::size_t num_filters) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < num_filters; ++i) names.push_back("mfsc_" + std::to_string(i));
  return names;
}

}  // namespace pvq
