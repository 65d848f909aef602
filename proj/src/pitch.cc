#include "pvq/pitch.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "pvq/error.h"

namespace pvq {
namespace {

// Hann-windowed sinc for interpolating a sequence sampled at integer lags.
double interpolation_kernel(double d, int width) {
  if (std::abs(d) >= width) return 0.0;
  const double window = 0.5 * (1.0 + std::cos(std::numbers::pi * d / width));
  if (d == 0.0) return window;
  return window * std::sin(std::numbers::pi * d) / (std::numbers::pi * d);
}

struct LagInterpolator {
  std::vector<int> first;  // first integer lag contributing to each grid lag
  std::vector<std::vector<double>> weights;
};

LagInterpolator make_interpolator(std::span<const double> lags, int width, int lo, int hi) {
  LagInterpolator interp;
  for (double lag : lags) {
    const int base = static_cast<int>(std::floor(lag));
    int first = base - width + 1;
    int last = base + width;
    std::vector<double> w;
    // Integer grid points reproduce the NCCF exactly.
    if (lag == base) {
      first = last = base;
    }
    first = std::max(first, lo);
    last = std::min(last, hi);
    for (int j = first; j <= last; ++j) w.push_back(interpolation_kernel(lag - j, width));
    interp.first.push_back(first);
    interp.weights.push_back(std::move(w));
  }
  return interp;
}

// Leftmost argmax of prev[j] - penalty * (u[i] - u[j])^2 for every i, using
// monotonicity of the optimal j in i.
void best_predecessors(std::span<const double> prev, std::span<const double> u,
                       double penalty, std::span<double> value,
                       std::span<std::size_t> arg) {
  struct Range {
    std::size_t i_lo, i_hi, j_lo, j_hi;
  };
  std::vector<Range> stack{{0, u.size() - 1, 0, u.size() - 1}};
  while (!stack.empty()) {
    const Range r = stack.back();
    stack.pop_back();
    const std::size_t mid = r.i_lo + (r.i_hi - r.i_lo) / 2;
    std::size_t best_j = r.j_lo;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = r.j_lo; j <= r.j_hi; ++j) {
      const double d = u[mid] - u[j];
      const double v = prev[j] - penalty * d * d;
      if (v > best) {
        best = v;
        best_j = j;
      }
    }
    value[mid] = best;
    arg[mid] = best_j;
    if (mid > r.i_lo) stack.push_back({r.i_lo, mid - 1, r.j_lo, best_j});
    if (mid < r.i_hi) stack.push_back({mid + 1, r.i_hi, best_j, r.j_hi});
  }
}

}  // namespace

void PitchConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, "pitch config: " + what);
  };
  if (internal_sr_hz <= 0) fail("internal_sr_hz must be positive");
  if (!(min_f0_hz > 0.0 && min_f0_hz < max_f0_hz)) fail("need 0 < min_f0_hz < max_f0_hz");
  if (!(max_f0_hz <= internal_sr_hz / 2.0)) fail("max_f0_hz exceeds internal_sr_hz / 2");
  if (!(penalty_factor >= 0.0)) fail("penalty_factor must be >= 0");
  if (!(nccf_ballast >= 0.0)) fail("nccf_ballast must be >= 0");
  if (!(soft_min_f0_hz >= 0.0 && soft_min_f0_hz < min_f0_hz)) {
    fail("soft_min_f0_hz must be in [0, min_f0_hz)");
  }
  if (!(lag_resolution >= 0.0 && lag_resolution < 1.0)) fail("lag_resolution must be in [0, 1)");
  if (upsample_filter_width < 1) fail("upsample_filter_width must be >= 1");
  if (!std::isfinite(pov_threshold)) fail("pov_threshold must be finite");
  frame_spec().validate(internal_sr_hz);
}

FrameSpec PitchConfig::frame_spec() const {
  return FrameSpec{window_ms, stride_ms, WindowType::kRectangular, 0.0};
}

std::vector<double> compute_nccf(std::span<const double> segment, std::size_t window,
                                 int min_lag, int max_lag, double ballast) {
  if (min_lag < 0 || max_lag < min_lag) {
    throw Error(ErrorCode::kInvalidArgument, "nccf: malformed lag range");
  }
  if (segment.size() < window + static_cast<std::size_t>(max_lag)) {
    throw Error(ErrorCode::kInvalidArgument,
                "nccf: lag " + std::to_string(max_lag) + " needs " +
                    std::to_string(window + max_lag) + " samples, segment has " +
                    std::to_string(segment.size()));
  }
  double e0 = 0.0;
  for (std::size_t n = 0; n < window; ++n) e0 += segment[n] * segment[n];

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(max_lag - min_lag + 1));
  for (int lag = min_lag; lag <= max_lag; ++lag) {
    const double* shifted = segment.data() + lag;
    double num = 0.0;
    double el = 0.0;
    // Direct sums keep identical segments bitwise identical across lags.
    for (std::size_t n = 0; n < window; ++n) {
      num += segment[n] * shifted[n];
      el += shifted[n] * shifted[n];
    }
    const double denom = std::sqrt((e0 + ballast) * el);
    out.push_back(denom > 0.0 ? std::clamp(num / denom, -1.0, 1.0) : 0.0);
  }
  return out;
}

ViterbiResult viterbi_lags(const Matrix<double>& table, std::span<const double> lags,
                           double penalty_factor) {
  const std::size_t num_frames = table.rows();
  const std::size_t num_lags = table.cols();
  if (num_frames == 0 || num_lags == 0) {
    throw Error(ErrorCode::kInvalidArgument, "viterbi: empty table");
  }
  if (lags.size() != num_lags) {
    throw Error(ErrorCode::kInvalidArgument, "viterbi: lag count does not match table width");
  }
  for (std::size_t k = 0; k < num_lags; ++k) {
    if (!(lags[k] > 0.0) || (k > 0 && !(lags[k] > lags[k - 1]))) {
      throw Error(ErrorCode::kInvalidArgument,
                  "viterbi: lags must be positive and strictly increasing");
    }
  }
  if (!(penalty_factor >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "viterbi: penalty must be >= 0");
  }

  std::vector<double> u(num_lags);
  for (std::size_t k = 0; k < num_lags; ++k) u[k] = std::log(lags[k]);

  Matrix<std::size_t> back(num_frames, num_lags);
  std::vector<double> prev(table.row(0).begin(), table.row(0).end());
  std::vector<double> best(num_lags);
  std::vector<double> cur(num_lags);
  for (std::size_t t = 1; t < num_frames; ++t) {
    best_predecessors(prev, u, penalty_factor, best, back.row(t));
    const auto row = table.row(t);
    for (std::size_t i = 0; i < num_lags; ++i) cur[i] = row[i] + best[i];
    prev.swap(cur);
  }

  ViterbiResult result;
  std::size_t k = static_cast<std::size_t>(
      std::distance(prev.begin(), std::max_element(prev.begin(), prev.end())));
  result.score = prev[k];
  result.path.resize(num_frames);
  for (std::size_t t = num_frames; t-- > 0;) {
    result.path[t] = k;
    if (t > 0) k = back(t, k);
  }
  return result;
}

double nccf_to_pov_feature(double nccf) {
  const double c = std::clamp(nccf, -1.0, 1.0);
  return 2.0 * (std::pow(1.0001 - c, -0.15) - 1.0);
}

FrameLayout FrameLayout::from(const FrameSpec& spec, std::size_t num_samples,
                              int sample_rate_hz) {
  spec.validate(sample_rate_hz);
  FrameLayout layout;
  layout.sample_rate_hz = sample_rate_hz;
  layout.window_samples = spec.window_samples(sample_rate_hz);
  layout.stride_samples = spec.stride_samples(sample_rate_hz);
  layout.num_frames = spec.num_frames(num_samples, sample_rate_hz);
  return layout;
}

double FrameLayout::center_s(std::size_t t) const {
  return (static_cast<double>(t * stride_samples) + 0.5 * static_cast<double>(window_samples)) /
         sample_rate_hz;
}

std::size_t FrameLayout::frame_at(double time_s) const {
  if (num_frames == 0) return 0;
  const double pos = (time_s * sample_rate_hz - 0.5 * static_cast<double>(window_samples)) /
                     static_cast<double>(stride_samples);
  const double t = std::clamp(std::round(pos), 0.0, static_cast<double>(num_frames - 1));
  return static_cast<std::size_t>(t);
}

std::vector<double> pitch_lag_grid(const PitchConfig& cfg) {
  const double min_lag = cfg.internal_sr_hz / cfg.max_f0_hz;
  const double max_lag = cfg.internal_sr_hz / cfg.min_f0_hz;
  std::vector<double> lags;
  if (cfg.lag_resolution > 0.0) {
    // Multiplying up from min_lag keeps every lag inside [min_lag, max_lag].
    for (double lag = min_lag; lag <= max_lag * (1.0 + 1e-12);
         lag *= 1.0 + cfg.lag_resolution) {
      lags.push_back(std::min(lag, max_lag));
    }
  } else {
    for (double lag = std::ceil(min_lag); lag <= std::floor(max_lag); lag += 1.0) {
      lags.push_back(lag);
    }
  }
  if (lags.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "pitch config: empty lag range");
  }
  return lags;
}

PitchTrack extract_pitch(const AudioBuffer& audio, const PitchConfig& cfg) {
  cfg.validate();
  PitchTrack track;
  track.internal_sr_hz = cfg.internal_sr_hz;
  track.layout = FrameLayout::from(cfg.frame_spec(), audio.size(), audio.sample_rate_hz);
  const std::size_t num_frames = track.layout.num_frames;
  if (num_frames == 0) {
    throw Error(ErrorCode::kTooShort,
                "signal of " + std::to_string(audio.size()) +
                    " samples is shorter than one pitch analysis window");
  }

  const AudioBuffer low = resample(audio, cfg.internal_sr_hz);
  const FrameSpec spec = cfg.frame_spec();
  const std::size_t window = spec.window_samples(cfg.internal_sr_hz);
  const std::size_t stride = spec.stride_samples(cfg.internal_sr_hz);

  const std::vector<double> lags = pitch_lag_grid(cfg);
  const bool refined = cfg.lag_resolution > 0.0;
  const int width = refined ? cfg.upsample_filter_width : 0;
  const int lo = std::max(1, static_cast<int>(std::floor(lags.front())) - width);
  const int hi = static_cast<int>(std::ceil(lags.back())) + width;
  const LagInterpolator interp = make_interpolator(lags, std::max(width, 1), lo, hi);

  const double ballast = cfg.nccf_ballast * static_cast<double>(window) /
                         cfg.internal_sr_hz / (32768.0 * 32768.0);

  const std::size_t span = window + static_cast<std::size_t>(hi);
  std::vector<double> segment(span);
  Matrix<double> nccf(num_frames, lags.size());
  Matrix<double> weighted(num_frames, lags.size());
  std::vector<double> lag_weight(lags.size());
  for (std::size_t k = 0; k < lags.size(); ++k) {
    lag_weight[k] = 1.0 - cfg.soft_min_f0_hz * lags[k] / cfg.internal_sr_hz;
  }

  for (std::size_t t = 0; t < num_frames; ++t) {
    const std::size_t start = t * stride;
    double mean = 0.0;
    for (std::size_t n = 0; n < span; ++n) {
      const std::size_t i = start + n;
      segment[n] = i < low.size() ? low.samples[i] : 0.0;
      mean += segment[n];
    }
    mean /= static_cast<double>(span);
    for (double& v : segment) v -= mean;

    const std::vector<double> raw = compute_nccf(segment, window, lo, hi, ballast);
    auto row = nccf.row(t);
    auto wrow = weighted.row(t);
    for (std::size_t k = 0; k < lags.size(); ++k) {
      const auto& w = interp.weights[k];
      double v = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) {
        v += w[j] * raw[static_cast<std::size_t>(interp.first[k] - lo) + j];
      }
      row[k] = std::clamp(v, -1.0, 1.0);
      wrow[k] = row[k] * lag_weight[k];
    }
  }

  const ViterbiResult best = viterbi_lags(weighted, lags, cfg.penalty_factor);
  track.frames.resize(num_frames);
  for (std::size_t t = 0; t < num_frames; ++t) {
    PitchFrame& f = track.frames[t];
    f.lag = lags[best.path[t]];
    f.nccf = nccf(t, best.path[t]);
    f.pov = nccf_to_pov_feature(f.nccf);
    f.log_pitch = std::log(cfg.internal_sr_hz / f.lag);
    f.delta_pitch = t == 0 ? 0.0 : f.log_pitch - track.frames[t - 1].log_pitch;
  }
  return track;
}

FeatureMatrix pitch_features(const PitchTrack& track) {
  FeatureMatrix m;
  m.values = Matrix<float>(track.size(), 3);
  for (std::size_t t = 0; t < track.size(); ++t) {
    const PitchFrame& f = track.frames[t];
    m.values(t, 0) = static_cast<float>(f.pov);
    m.values(t, 1) = static_cast<float>(f.log_pitch);
    m.values(t, 2) = static_cast<float>(f.delta_pitch);
  }
  m.columns = {"pov", "log_pitch", "delta_pitch"};
  return m;
}

void write_pitch_csv(const PitchTrack& track, std::ostream& out) {
  out << "frame,time_s,lag,nccf,f0_hz,pov,log_pitch,delta_pitch\n";
  char line[256];
  for (std::size_t t = 0; t < track.size(); ++t) {
    const PitchFrame& f = track.frames[t];
    std::snprintf(line, sizeof line, "%zu,%.4f,%.6g,%.6g,%.6g,%.6g,%.9g,%.9g\n", t,
                  track.layout.center_s(t), f.lag, f.nccf, f.f0_hz(track.internal_sr_hz),
                  f.pov, f.log_pitch, f.delta_pitch);
    out << line;
  }
}

}  // namespace pvq
