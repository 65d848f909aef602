#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.h"
#include "pvq/error.h"
#include "pvq/mfsc.h"
#include "pvq/pitch.h"
#include "pvq/synth.h"

namespace {

pvq::AudioBuffer make(pvq::SynthKind kind, double f0, double f1, double dur,
                      std::vector<double> periods = {1.0}) {
  pvq::SynthSpec s;
  s.kind = kind;
  s.f0_start_hz = f0;
  s.f0_end_hz = f1;
  s.duration_s = dur;
  s.period_pattern = std::move(periods);
  s.seed = 3;
  return pvq::synth(s).audio;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST_CASE("nccf of a periodic signal is one at the period") {
  std::vector<double> x(400);
  for (std::size_t n = 0; n < x.size(); ++n) x[n] = std::sin(2.0 * std::numbers::pi * n / 25.0) + 0.3 * std::cos(4.0 * std::numbers::pi * n / 25.0);
  const auto r = pvq::compute_nccf(x, 100, 10, 60, 0.0);
  CHECK(r[25 - 10] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r[50 - 10] == doctest::Approx(1.0).epsilon(1e-6));
  for (double v : r) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("nccf of silence is zero") {
  std::vector<double> x(300, 0.0);
  for (double v : pvq::compute_nccf(x, 100, 1, 100, 0.0)) CHECK(v == 0.0);
  for (double v : pvq::compute_nccf(x, 100, 1, 100, 1e-3)) CHECK(v == 0.0);
}

TEST_CASE("nccf needs lookahead for the largest lag") {
  std::vector<double> x(150, 1.0);
  CHECK_THROWS_AS(pvq::compute_nccf(x, 100, 1, 60, 0.0), pvq::Error);
}

TEST_CASE("100 Hz pulse train at 4 kHz peaks at lag 40") {
  const auto low = pvq::resample(make(pvq::SynthKind::kPulseTrain, 100, 100, 0.5), 4000);
  std::vector<double> seg(low.samples.begin() + 400, low.samples.begin() + 400 + 100 + 80);
  const auto r = pvq::compute_nccf(seg, 100, 10, 80, 0.0);
  const int got = static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin()) + 10;
  CHECK(got == oracle::autocorrelation_argmax(seg, 100, 10, 80));
  CHECK(got == 40);
}

TEST_CASE("viterbi with one frame is the row argmax") {
  pvq::Matrix<double> t(1, 4);
  t(0, 0) = 0.1;
  t(0, 1) = 0.9;
  t(0, 2) = 0.9;
  t(0, 3) = 0.2;
  const std::vector<double> lags{10, 11, 12, 13};
  const auto r = pvq::viterbi_lags(t, lags, 0.1);
  CHECK(r.path == std::vector<std::size_t>{1});
  CHECK(r.score == 0.9);
}

TEST_CASE("viterbi without penalty is a per-frame argmax") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  pvq::Matrix<double> t(20, 30);
  for (double& v : t.data()) v = u(rng);
  std::vector<double> lags;
  for (int k = 0; k < 30; ++k) lags.push_back(10.0 + k);
  const auto r = pvq::viterbi_lags(t, lags, 0.0);
  for (std::size_t f = 0; f < 20; ++f) {
    const auto row = t.row(f);
    CHECK(r.path[f] == static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin()));
  }
}

TEST_CASE("viterbi equals exhaustive search on random tables") {
  std::mt19937 rng(20);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t T = 1 + rng() % 6;
    const std::size_t L = 1 + rng() % 8;
    pvq::Matrix<double> t(T, L);
    for (double& v : t.data()) v = u(rng);
    std::vector<double> lags;
    double lag = 8.0 + rng() % 10;
    for (std::size_t k = 0; k < L; ++k) {
      lags.push_back(lag);
      lag += 0.5 + (rng() % 100) / 10.0;
    }
    const double penalty = trial % 4 == 0 ? 0.1 : (rng() % 1000) / 100.0;
    const auto got = pvq::viterbi_lags(t, lags, penalty);
    const auto want = oracle::exhaustive_lags(t, lags, penalty);
    CHECK(got.score == want.score);
  }
}

TEST_CASE("viterbi breaks ties toward the smaller lag") {
  pvq::Matrix<double> t(3, 3, 0.5);
  const std::vector<double> lags{10, 20, 40};
  const auto r = pvq::viterbi_lags(t, lags, 0.1);
  CHECK(r.path == std::vector<std::size_t>{0, 0, 0});
}

TEST_CASE("pov feature is strictly increasing and finite") {
  double prev = -INFINITY;
  for (double c = -1.0; c <= 1.0; c += 0.001) {
    const double p = pvq::nccf_to_pov_feature(c);
    CHECK(std::isfinite(p));
    CHECK(p > prev);
    prev = p;
  }
  for (double c : {-1.0, 0.0, 1.0}) CHECK(std::isfinite(pvq::nccf_to_pov_feature(c)));
}

TEST_CASE("constant tones are tracked within 2 Hz") {
  pvq::PitchConfig cfg;
  for (double f0 : {100.0, 150.0, 200.0, 300.0}) {
    const auto track = pvq::extract_pitch(make(pvq::SynthKind::kSine, f0, f0, 2.0), cfg);
    std::vector<double> err;
    for (const auto& f : track.frames) err.push_back(std::abs(f.f0_hz(cfg.internal_sr_hz) - f0));
    CHECK(median(err) < 2.0);
    for (std::size_t t = 5; t + 5 < track.size(); ++t) {
      CHECK(std::abs(track.frames[t].delta_pitch) < 0.01);
    }
  }
}

TEST_CASE("log pitch of a 100 Hz tone") {
  const auto track = pvq::extract_pitch(make(pvq::SynthKind::kSine, 100, 100, 1.0), {});
  std::vector<double> lp;
  for (const auto& f : track.frames) lp.push_back(f.log_pitch);
  CHECK(std::abs(median(lp) - std::log(100.0)) < 0.02);
}

TEST_CASE("chirp is tracked monotonically") {
  const auto track = pvq::extract_pitch(make(pvq::SynthKind::kChirp, 100, 200, 2.0), {});
  std::size_t pairs = 0;
  std::size_t ok = 0;
  for (std::size_t t = 3; t + 4 < track.size(); ++t) {
    ++pairs;
    if (track.frames[t + 1].lag <= track.frames[t].lag) ++ok;
  }
  CHECK(static_cast<double>(ok) >= 0.9 * static_cast<double>(pairs));
}

TEST_CASE("track invariants hold on varied signals") {
  pvq::PitchConfig cfg;
  for (const auto& audio : {make(pvq::SynthKind::kWhiteNoise, 100, 100, 0.7),
                            make(pvq::SynthKind::kSilence, 100, 100, 0.5),
                            make(pvq::SynthKind::kChirp, 60, 390, 1.0),
                            make(pvq::SynthKind::kPulseTrain, 80, 320, 1.3, {1.0, 1.05})}) {
    const auto track = pvq::extract_pitch(audio, cfg);
    const auto mfsc_frames = pvq::FrameSpec{}.num_frames(audio.size(), audio.sample_rate_hz);
    CHECK(track.size() == mfsc_frames);
    REQUIRE(track.size() > 0);
    CHECK(track.frames[0].delta_pitch == 0.0);
    for (std::size_t t = 0; t < track.size(); ++t) {
      const auto& f = track.frames[t];
      const double f0 = f.f0_hz(cfg.internal_sr_hz);
      CHECK(f0 >= cfg.min_f0_hz);
      CHECK(f0 <= cfg.max_f0_hz);
      CHECK(f.nccf >= -1.0);
      CHECK(f.nccf <= 1.0);
      CHECK(f.pov == pvq::nccf_to_pov_feature(f.nccf));
      if (t > 0) CHECK(f.delta_pitch + track.frames[t - 1].log_pitch == f.log_pitch);
    }
  }
}

TEST_CASE("pitch frames align with mfsc frames for odd lengths") {
  for (double dur : {0.025, 0.0251, 0.1234, 0.5, 1.003}) {
    const auto a = make(pvq::SynthKind::kSine, 220, 220, dur);
    const auto fb = pvq::build_filterbank(16000, 40, 512);
    CHECK(pvq::extract_pitch(a, {}).size() == pvq::compute_mfsc(a, {}, fb).rows());
  }
}

TEST_CASE("voiced signals have higher pov than noise") {
  auto mean_pov = [](const pvq::AudioBuffer& a) {
    const auto tr = pvq::extract_pitch(a, {});
    double s = 0.0;
    for (const auto& f : tr.frames) s += f.pov;
    return s / static_cast<double>(tr.size());
  };
  const double voiced = mean_pov(make(pvq::SynthKind::kPulseTrain, 120, 120, 1.0));
  const double noise = mean_pov(make(pvq::SynthKind::kWhiteNoise, 0, 0, 1.0));
  CHECK(voiced > noise);
}

TEST_CASE("white noise is mostly below the voicing threshold") {
  pvq::PitchConfig cfg;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    pvq::SynthSpec s;
    s.kind = pvq::SynthKind::kWhiteNoise;
    s.duration_s = 2.0;
    s.seed = seed;
    const auto tr = pvq::extract_pitch(pvq::synth(s).audio, cfg);
    std::size_t unvoiced = 0;
    for (const auto& f : tr.frames) unvoiced += f.pov < cfg.pov_threshold;
    CHECK(static_cast<double>(unvoiced) >= 0.9 * static_cast<double>(tr.size()));
  }
}

TEST_CASE("lag decisions on a clean tone do not depend on gain") {
  const auto base = make(pvq::SynthKind::kSine, 200, 200, 1.0);
  const auto ref = pvq::extract_pitch(base, {});
  for (float gain : {0.5f, 2.0f}) {
    auto a = base;
    for (float& v : a.samples) v *= gain;
    const auto tr = pvq::extract_pitch(a, {});
    REQUIRE(tr.size() == ref.size());
    for (std::size_t t = 0; t < tr.size(); ++t) CHECK(tr.frames[t].lag == ref.frames[t].lag);
  }
}

TEST_CASE("pitch config validation") {
  pvq::PitchConfig c;
  c.min_f0_hz = 500;
  CHECK_THROWS_AS(c.validate(), pvq::Error);
  c = {};
  c.max_f0_hz = 2500;
  CHECK_THROWS_AS(c.validate(), pvq::Error);
  c = {};
  c.penalty_factor = -1;
  CHECK_THROWS_AS(c.validate(), pvq::Error);
  pvq::AudioBuffer tiny;
  tiny.samples.assign(100, 0.1f);
  try {
    pvq::extract_pitch(tiny, {});
    FAIL("expected kTooShort");
  } catch (const pvq::Error& e) {
    CHECK(e.code() == pvq::ErrorCode::kTooShort);
  }
}

TEST_CASE("frame layout lookups") {
  const auto l = pvq::FrameLayout::from(pvq::FrameSpec{}, 16000, 16000);
  CHECK(l.num_frames == 98);
  CHECK(l.center_s(0) == doctest::Approx(0.0125));
  CHECK(l.frame_at(l.center_s(37)) == 37);
  CHECK(l.frame_at(-5.0) == 0);
  CHECK(l.frame_at(100.0) == 97);
}
