#include "pvq/voice_quality.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "pvq/error.h"

namespace pvq {
namespace {

struct Epoch {
  long index = 0;
  double offset = 0.0;  // parabolic refinement, in samples
  bool peak = false;
};

std::size_t argmax(std::span<const float> x, long lo, long hi) {
  long best = lo;
  for (long k = lo + 1; k <= hi; ++k) {
    if (x[k] > x[best]) best = k;
  }
  return static_cast<std::size_t>(best);
}

long argmin(std::span<const float> x, long lo, long hi) {
  long best = lo;
  for (long k = lo + 1; k <= hi; ++k) {
    if (x[k] < x[best]) best = k;
  }
  return best;
}

Epoch make_epoch(std::span<const float> x, long k) {
  Epoch e;
  e.index = k;
  const long n = static_cast<long>(x.size());
  if (k <= 0 || k >= n - 1) return e;
  const double left = x[k - 1];
  const double mid = x[k];
  const double right = x[k + 1];
  e.peak = mid > left && mid >= right;
  const double denom = left - 2.0 * mid + right;
  if (e.peak && denom < 0.0) {
    e.offset = std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
  }
  return e;
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

PeriodMarks mark_periods(const AudioBuffer& audio, const PitchTrack& track,
                         const PitchConfig& cfg) {
  PeriodMarks marks;
  const std::span<const float> x = audio.samples;
  const long n = static_cast<long>(x.size());
  if (track.size() == 0 || n < 3) return marks;
  if (track.layout.sample_rate_hz != audio.sample_rate_hz) {
    throw Error(ErrorCode::kInvalidArgument, "mark_periods: track not aligned to the audio");
  }
  const double sr = audio.sample_rate_hz;
  const double min_period = sr / cfg.max_f0_hz;
  const double max_period = sr / cfg.min_f0_hz;
  auto period_at = [&](double pos) {
    const PitchFrame& f = track.frames[track.layout.frame_at(pos / sr)];
    return sr / f.f0_hz(track.internal_sr_hz);
  };

  std::vector<Epoch> epochs;
  {
    const long first_hi = std::min(n - 1, static_cast<long>(std::ceil(period_at(0.0))) - 1);
    epochs.push_back(make_epoch(x, static_cast<long>(argmax(x, 0, std::max(first_hi, 0L)))));
  }
  // Integer spacing stays within [min_period + 1, max_period - 1], so the
  // refined period (offsets within half a sample) stays inside the f0 range.
  const long min_step = static_cast<long>(std::ceil(min_period)) + 1;
  const long max_step = static_cast<long>(std::floor(max_period)) - 1;
  while (true) {
    const Epoch& last = epochs.back();
    const double period = period_at(static_cast<double>(last.index));
    long lo = std::max(min_step, static_cast<long>(std::ceil(0.8 * period)));
    long hi = std::min(max_step, static_cast<long>(std::floor(1.2 * period)));
    if (lo > hi) lo = hi = std::clamp(std::lround(period), min_step, max_step);
    if (last.index + hi >= n) break;
    epochs.push_back(
        make_epoch(x, static_cast<long>(argmax(x, last.index + lo, last.index + hi))));
  }
  if (epochs.size() < 2) return marks;

  long trough_before = epochs[0].index;
  {
    const long span = epochs[1].index - epochs[0].index;
    const long lo = std::max(0L, epochs[0].index - span);
    if (lo < epochs[0].index) trough_before = argmin(x, lo, epochs[0].index - 1);
  }
  bool any_voiced = false;
  for (std::size_t i = 0; i + 1 < epochs.size(); ++i) {
    const Epoch& a = epochs[i];
    const Epoch& b = epochs[i + 1];
    const long trough_after = argmin(x, a.index + 1, b.index - 1);
    float hi_v = x[trough_before];
    float lo_v = x[trough_before];
    for (long k = trough_before; k <= trough_after; ++k) {
      hi_v = std::max(hi_v, x[k]);
      lo_v = std::min(lo_v, x[k]);
    }
    Cycle c;
    const double pos = static_cast<double>(a.index) + a.offset;
    c.start_s = pos / sr;
    c.period_s = (static_cast<double>(b.index - a.index) + (b.offset - a.offset)) / sr;
    c.amplitude = static_cast<double>(hi_v) - static_cast<double>(lo_v);
    c.pov = track.frames[track.layout.frame_at(c.start_s)].pov;
    c.voiced = c.pov >= cfg.pov_threshold && a.peak && b.peak;
    any_voiced = any_voiced || c.voiced;
    marks.cycles.push_back(c);
    trough_before = trough_after;
  }
  if (!any_voiced) marks.cycles.clear();
  return marks;
}

std::optional<double> jitter_absolute(std::span<const double> periods) {
  if (periods.size() < 2) return std::nullopt;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < periods.size(); ++i) {
    sum += std::abs(periods[i + 1] - periods[i]);
  }
  return sum / static_cast<double>(periods.size() - 1);
}

std::optional<double> jitter_relative(std::span<const double> periods) {
  const auto abs = jitter_absolute(periods);
  if (!abs) return std::nullopt;
  return *abs / mean(periods) * 100.0;
}

std::optional<double> shimmer_db(std::span<const double> amplitudes) {
  std::vector<double> a;
  for (double v : amplitudes) {
    if (v > 0.0) a.push_back(v);
  }
  if (a.size() < 2) return std::nullopt;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    sum += std::abs(20.0 * std::log10(a[i + 1] / a[i]));
  }
  return sum / static_cast<double>(a.size() - 1);
}

std::optional<double> shimmer_relative(std::span<const double> amplitudes) {
  if (amplitudes.size() < 2) return std::nullopt;
  const double m = mean(amplitudes);
  if (!(m > 0.0)) return std::nullopt;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < amplitudes.size(); ++i) {
    sum += std::abs(amplitudes[i + 1] - amplitudes[i]);
  }
  return sum / static_cast<double>(amplitudes.size() - 1) / m * 100.0;
}

std::string_view vq_measure_name(VqMeasure m) {
  switch (m) {
    case VqMeasure::kJitterAbs: return "jitter_abs";
    case VqMeasure::kJitterRel: return "jitter_rel";
    case VqMeasure::kShimmerDb: return "shimmer_db";
    case VqMeasure::kShimmerRel: return "shimmer_rel";
  }
  return "";
}

std::optional<VqMeasure> parse_vq_measure(std::string_view name) {
  for (VqMeasure m : {VqMeasure::kJitterAbs, VqMeasure::kJitterRel, VqMeasure::kShimmerDb,
                      VqMeasure::kShimmerRel}) {
    if (vq_measure_name(m) == name) return m;
  }
  return std::nullopt;
}

double VoiceQualityFrame::get(VqMeasure m) const {
  switch (m) {
    case VqMeasure::kJitterAbs: return jitter_abs_s;
    case VqMeasure::kJitterRel: return jitter_rel_pct;
    case VqMeasure::kShimmerDb: return shimmer_db;
    case VqMeasure::kShimmerRel: return shimmer_rel_pct;
  }
  return 0.0;
}

std::vector<VoiceQualityFrame> voice_quality_track(const PeriodMarks& marks,
                                                   const FrameLayout& layout,
                                                   double window_s) {
  if (!(window_s > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "voice quality: window must be positive");
  }
  const auto& cycles = marks.cycles;
  std::vector<VoiceQualityFrame> out(layout.num_frames);
  std::size_t first = 0;
  std::size_t last = 0;  // one past the final cycle in the window
  for (std::size_t t = 0; t < layout.num_frames; ++t) {
    const double center = layout.center_s(t);
    const double lo = center - 0.5 * window_s;
    const double hi = center + 0.5 * window_s;
    while (first < cycles.size() && cycles[first].start_s < lo) ++first;
    last = std::max(last, first);
    while (last < cycles.size() && cycles[last].start_s <= hi) ++last;

    std::size_t voiced = 0;
    double period_sum = 0.0;
    double amp_sum = 0.0;
    std::size_t pairs = 0;
    double period_diff = 0.0;
    double amp_diff = 0.0;
    std::size_t db_pairs = 0;
    double db_diff = 0.0;
    for (std::size_t i = first; i < last; ++i) {
      const Cycle& c = cycles[i];
      if (!c.voiced) continue;
      ++voiced;
      period_sum += c.period_s;
      amp_sum += c.amplitude;
      if (i + 1 < last && cycles[i + 1].voiced) {
        const Cycle& d = cycles[i + 1];
        ++pairs;
        period_diff += std::abs(d.period_s - c.period_s);
        amp_diff += std::abs(d.amplitude - c.amplitude);
        if (c.amplitude > 0.0 && d.amplitude > 0.0) {
          ++db_pairs;
          db_diff += std::abs(20.0 * std::log10(d.amplitude / c.amplitude));
        }
      }
    }
    if (voiced < 2 || pairs == 0) continue;

    VoiceQualityFrame& f = out[t];
    const double mean_period = period_sum / static_cast<double>(voiced);
    const double mean_amp = amp_sum / static_cast<double>(voiced);
    f.jitter_abs_s = period_diff / static_cast<double>(pairs);
    f.jitter_rel_pct = f.jitter_abs_s / mean_period * 100.0;
    if (mean_amp > 0.0) {
      f.shimmer_rel_pct = amp_diff / static_cast<double>(pairs) / mean_amp * 100.0;
    }
    if (db_pairs > 0) f.shimmer_db = db_diff / static_cast<double>(db_pairs);
  }
  return out;
}

FeatureMatrix extract_vq(const AudioBuffer& audio, const PitchTrack& track,
                         const PitchConfig& cfg, std::span<const VqMeasure> which,
                         double window_s) {
  const FrameLayout expected = FrameLayout::from(cfg.frame_spec(), audio.size(),
                                                 audio.sample_rate_hz);
  if (track.layout.num_frames != expected.num_frames ||
      track.layout.sample_rate_hz != expected.sample_rate_hz || track.size() != expected.num_frames) {
    throw Error(ErrorCode::kInvalidArgument, "extract_vq: pitch track not frame-aligned");
  }
  const PeriodMarks marks = mark_periods(audio, track, cfg);
  const auto frames = voice_quality_track(marks, track.layout, window_s);
  FeatureMatrix m;
  m.values = Matrix<float>(frames.size(), which.size());
  for (std::size_t t = 0; t < frames.size(); ++t) {
    for (std::size_t c = 0; c < which.size(); ++c) {
      m.values(t, c) = static_cast<float>(frames[t].get(which[c]));
    }
  }
  for (VqMeasure w : which) m.columns.emplace_back(vq_measure_name(w));
  return m;
}

void write_cycles_csv(const PeriodMarks& marks, std::ostream& out) {
  out << "start_s,period_s,amplitude,pov,voiced\n";
  char line[160];
  for (const Cycle& c : marks.cycles) {
    std::snprintf(line, sizeof line, "%.6f,%.9g,%.6g,%.6g,%d\n", c.start_s, c.period_s,
                  c.amplitude, c.pov, c.voiced ? 1 : 0);
    out << line;
  }
}

}  // namespace pvq
