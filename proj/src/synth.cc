#include "pvq/synth.h"

#include <cmath>
#include <numbers>
#include <random>

#include "json.hpp"
#include "pvq/error.h"

namespace pvq {
namespace {

constexpr const char* kNoiseGenerator = "mt19937_64/uniform53";

double swept_f0(const SynthSpec& spec, double t) {
  return spec.f0_start_hz + (spec.f0_end_hz - spec.f0_start_hz) * t / spec.duration_s;
}

}  // namespace

std::string_view synth_kind_name(SynthKind kind) {
  switch (kind) {
    case SynthKind::kSine: return "sine";
    case SynthKind::kChirp: return "chirp";
    case SynthKind::kPulseTrain: return "pulse_train";
    case SynthKind::kWhiteNoise: return "white_noise";
    case SynthKind::kSilence: return "silence";
  }
  return "";
}

SynthKind parse_synth_kind(std::string_view name) {
  for (SynthKind k : {SynthKind::kSine, SynthKind::kChirp, SynthKind::kPulseTrain,
                      SynthKind::kWhiteNoise, SynthKind::kSilence}) {
    if (synth_kind_name(k) == name) return k;
  }
  if (name == "pulse" || name == "pulses") return SynthKind::kPulseTrain;
  if (name == "noise") return SynthKind::kWhiteNoise;
  throw Error(ErrorCode::kInvalidArgument, "unknown signal kind '" + std::string(name) + "'");
}

void SynthSpec::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, "synth: " + what);
  };
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) fail("duration must be positive");
  if (sample_rate_hz <= 0) fail("sample rate must be positive");
  if (!std::isfinite(amplitude) || amplitude < 0.0) fail("amplitude must be >= 0");
  const bool periodic = kind == SynthKind::kSine || kind == SynthKind::kChirp ||
                        kind == SynthKind::kPulseTrain;
  if (periodic && !(f0_start_hz > 0.0 && f0_end_hz > 0.0)) fail("f0 must be positive");
  if (kind == SynthKind::kPulseTrain) {
    if (amplitude_pattern.empty() || period_pattern.empty()) fail("empty pattern");
    for (double v : amplitude_pattern) {
      if (!std::isfinite(v) || v < 0.0) fail("amplitude pattern must be finite and >= 0");
    }
    for (double v : period_pattern) {
      if (!std::isfinite(v) || v <= 0.0) fail("period pattern must be finite and > 0");
    }
  }
}

double GroundTruth::f0_at(double time_s, double duration_s) const {
  return f0_start_hz + (f0_end_hz - f0_start_hz) * time_s / duration_s;
}

std::vector<double> GroundTruth::periods() const {
  std::vector<double> v;
  for (const auto& c : cycles) v.push_back(c.period_s);
  return v;
}

std::vector<double> GroundTruth::amplitudes() const {
  std::vector<double> v;
  for (const auto& c : cycles) v.push_back(c.amplitude);
  return v;
}

SynthResult synth(const SynthSpec& spec) {
  spec.validate();
  const double sr = spec.sample_rate_hz;
  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * sr));
  SynthResult out;
  out.audio.sample_rate_hz = spec.sample_rate_hz;
  out.audio.samples.assign(n, 0.0f);
  out.truth.f0_start_hz = spec.f0_start_hz;
  out.truth.f0_end_hz = spec.kind == SynthKind::kSine ? spec.f0_start_hz : spec.f0_end_hz;
  auto& x = out.audio.samples;

  switch (spec.kind) {
    case SynthKind::kSilence:
      break;
    case SynthKind::kSine:
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = static_cast<float>(
            spec.amplitude * std::sin(2.0 * std::numbers::pi * spec.f0_start_hz * i / sr));
      }
      break;
    case SynthKind::kChirp: {
      const double slope = (spec.f0_end_hz - spec.f0_start_hz) / spec.duration_s;
      for (std::size_t i = 0; i < n; ++i) {
        const double t = i / sr;
        const double phase = 2.0 * std::numbers::pi * (spec.f0_start_hz * t + 0.5 * slope * t * t);
        x[i] = static_cast<float>(spec.amplitude * std::sin(phase));
      }
      break;
    }
    case SynthKind::kWhiteNoise: {
      std::mt19937_64 rng(spec.seed);
      for (std::size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        x[i] = static_cast<float>(spec.amplitude * (2.0 * u - 1.0));
      }
      out.truth.noise_generator = kNoiseGenerator;
      break;
    }
    case SynthKind::kPulseTrain: {
      std::vector<double> acc(n, 0.0);
      double start = 0.0;  // in samples
      for (std::size_t i = 0;; ++i) {
        const double base = sr / swept_f0(spec, start / sr);
        const double period = base * spec.period_pattern[i % spec.period_pattern.size()];
        const double gain =
            spec.amplitude * spec.amplitude_pattern[i % spec.amplitude_pattern.size()];
        const double width = 0.5 * base;
        const double center = start + 0.5 * width;
        if (start >= static_cast<double>(n)) break;
        const auto lo = static_cast<long>(std::ceil(center - 0.5 * width));
        const auto hi = static_cast<long>(std::floor(center + 0.5 * width));
        for (long k = std::max(lo, 0L); k <= hi && k < static_cast<long>(n); ++k) {
          const double d = static_cast<double>(k) - center;
          if (std::abs(d) >= 0.5 * width) continue;
          acc[k] += gain * 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * d / width));
        }
        if (start + period <= static_cast<double>(n)) {
          out.truth.cycles.push_back({start / sr, period / sr, gain, center / sr});
        }
        start += period;
      }
      for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<float>(acc[i]);
      break;
    }
  }
  return out;
}

std::string ground_truth_json(const SynthSpec& spec, const GroundTruth& truth) {
  nlohmann::json j;
  j["kind"] = synth_kind_name(spec.kind);
  j["sample_rate_hz"] = spec.sample_rate_hz;
  j["duration_s"] = spec.duration_s;
  j["amplitude"] = spec.amplitude;
  j["f0_start_hz"] = truth.f0_start_hz;
  j["f0_end_hz"] = truth.f0_end_hz;
  if (spec.kind == SynthKind::kPulseTrain) {
    j["amplitude_pattern"] = spec.amplitude_pattern;
    j["period_pattern"] = spec.period_pattern;
  }
  if (spec.kind == SynthKind::kWhiteNoise) {
    j["seed"] = spec.seed;
    j["noise_generator"] = truth.noise_generator;
  }
  nlohmann::json cycles = nlohmann::json::array();
  for (const auto& c : truth.cycles) {
    cycles.push_back({{"start_s", c.start_s},
                      {"period_s", c.period_s},
                      {"amplitude", c.amplitude},
                      {"epoch_s", c.epoch_s}});
  }
  j["cycles"] = std::move(cycles);
  return j.dump(2) + "\n";
}

}  // namespace pvq
