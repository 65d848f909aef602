#include <cmath>
#include <numeric>

#include "doctest.h"
#include "pvq/error.h"
#include "pvq/synth.h"
#include "pvq/voice_quality.h"

namespace {

struct Train {
  double f0 = 100.0;
  std::vector<double> periods{1.0};
  std::vector<double> amps{1.0};
  double duration = 3.0;
  int sr = 16000;
  double amplitude = 0.5;
};

pvq::AudioBuffer train(const Train& t) {
  pvq::SynthSpec s;
  s.kind = pvq::SynthKind::kPulseTrain;
  s.f0_start_hz = s.f0_end_hz = t.f0;
  s.period_pattern = t.periods;
  s.amplitude_pattern = t.amps;
  s.duration_s = t.duration;
  s.sample_rate_hz = t.sr;
  s.amplitude = t.amplitude;
  return pvq::synth(s).audio;
}

std::vector<pvq::VoiceQualityFrame> frames_of(const pvq::AudioBuffer& a) {
  const pvq::PitchConfig cfg;
  const auto track = pvq::extract_pitch(a, cfg);
  return pvq::voice_quality_track(pvq::mark_periods(a, track, cfg), track.layout, 0.5);
}

// Mean over frames whose 500 ms window lies inside the signal.
double interior_mean(const std::vector<pvq::VoiceQualityFrame>& f, pvq::VqMeasure m) {
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t t = 30; t + 30 < f.size(); ++t) {
    s += f[t].get(m);
    ++n;
  }
  return s / static_cast<double>(n);
}

}  // namespace

TEST_CASE("jitter closed forms") {
  const std::vector<double> equal{0.01, 0.01, 0.01};
  CHECK(*pvq::jitter_absolute(equal) == 0.0);
  CHECK(*pvq::jitter_relative(equal) == 0.0);
  const std::vector<double> alt{5.0e-3, 5.1e-3, 5.0e-3, 5.1e-3};
  CHECK(*pvq::jitter_absolute(alt) == doctest::Approx(1.0e-4).epsilon(1e-9));
  CHECK(*pvq::jitter_relative(alt) == doctest::Approx(0.1 / 5.05 * 100).epsilon(1e-9));
  CHECK(*pvq::jitter_absolute(std::vector<double>{10e-3, 8e-3}) == doctest::Approx(2.0e-3).epsilon(1e-12));
  std::vector<double> scaled(alt);
  for (double& v : scaled) v *= 3.7;
  CHECK(*pvq::jitter_relative(scaled) == doctest::Approx(*pvq::jitter_relative(alt)).epsilon(1e-12));
  CHECK(!pvq::jitter_absolute(std::vector<double>{0.01}).has_value());
}

TEST_CASE("shimmer closed forms") {
  CHECK(*pvq::shimmer_db(std::vector<double>{0.3, 0.3, 0.3}) == 0.0);
  CHECK(*pvq::shimmer_db(std::vector<double>{1.0, std::pow(10.0, 1.0 / 20.0)}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(*pvq::shimmer_relative(std::vector<double>{0.3, 0.3}) == 0.0);
  CHECK(*pvq::shimmer_relative(std::vector<double>{1.0, 0.9, 1.0, 0.9}) ==
        doctest::Approx(0.1 / 0.95 * 100).epsilon(1e-9));
  const std::vector<double> a{0.2, 0.5, 0.35, 0.41};
  std::vector<double> b(a);
  for (double& v : b) v *= 0.013;
  CHECK(*pvq::shimmer_db(b) == doctest::Approx(*pvq::shimmer_db(a)).epsilon(1e-12));
  CHECK(*pvq::shimmer_relative(b) == doctest::Approx(*pvq::shimmer_relative(a)).epsilon(1e-12));
  // Zero-amplitude cycles are dropped before taking logs.
  CHECK(*pvq::shimmer_db(std::vector<double>{1.0, 0.0, 1.0}) == 0.0);
  CHECK(!pvq::shimmer_db(std::vector<double>{0.0, 1.0}).has_value());
}

TEST_CASE("100 Hz pulse train yields 10 ms cycles") {
  const auto a = train({.duration = 1.0});
  const pvq::PitchConfig cfg;
  const auto marks = pvq::mark_periods(a, pvq::extract_pitch(a, cfg), cfg);
  CHECK(marks.cycles.size() >= 97);
  CHECK(marks.cycles.size() <= 100);
  for (std::size_t i = 0; i < marks.cycles.size(); ++i) {
    const auto& c = marks.cycles[i];
    CHECK(std::abs(c.period_s - 0.010) <= 1.0 / 16000);
    if (i > 0) {
      const auto& p = marks.cycles[i - 1];
      CHECK(c.start_s > p.start_s);
      CHECK(std::abs(c.start_s - (p.start_s + p.period_s)) <= 1.0 / 16000);
    }
  }
}

TEST_CASE("sine cycles have equal peak-to-peak amplitude") {
  pvq::SynthSpec s;
  s.kind = pvq::SynthKind::kSine;
  s.f0_start_hz = s.f0_end_hz = 200.0;
  const auto a = pvq::synth(s).audio;
  const pvq::PitchConfig cfg;
  const auto marks = pvq::mark_periods(a, pvq::extract_pitch(a, cfg), cfg);
  REQUIRE(marks.cycles.size() > 150);
  for (const auto& c : marks.cycles) CHECK(std::abs(c.amplitude - 1.0) < 0.01);
}

TEST_CASE("silence has no cycles") {
  pvq::AudioBuffer a;
  a.samples.assign(16000, 0.0f);
  const pvq::PitchConfig cfg;
  CHECK(pvq::mark_periods(a, pvq::extract_pitch(a, cfg), cfg).cycles.empty());
}

TEST_CASE("periodic constant train gives exactly zero everywhere") {
  const auto f = frames_of(train({}));
  for (const auto& v : f) {
    CHECK(v.jitter_abs_s == 0.0);
    CHECK(v.jitter_rel_pct == 0.0);
    CHECK(v.shimmer_db == 0.0);
    CHECK(v.shimmer_rel_pct == 0.0);
  }
}

TEST_CASE("alternating periods give the closed-form jitter") {
  const double want = 0.02 / 1.01 * 100.0;  // 1.9802 %
  const double got = interior_mean(frames_of(train({.periods = {1.0, 1.02}})), pvq::VqMeasure::kJitterRel);
  CHECK(std::abs(got - want) <= 0.1 * want);
  // 5.0 / 5.1 ms at 200 Hz.
  const double got200 =
      interior_mean(frames_of(train({.f0 = 200.0, .periods = {1.0, 1.02}})), pvq::VqMeasure::kJitterRel);
  CHECK(std::abs(got200 - 0.1 / 5.05 * 100) <= 0.1 * 0.1 / 5.05 * 100);
}

TEST_CASE("alternating amplitudes give the closed-form shimmer") {
  const double rel = interior_mean(frames_of(train({.amps = {1.0, 0.9}})), pvq::VqMeasure::kShimmerRel);
  CHECK(std::abs(rel - 10.526) <= 0.1 * 10.526);
  const double db = interior_mean(frames_of(train({.amps = {1.0, std::pow(10.0, 1.0 / 20.0)}})),
                                  pvq::VqMeasure::kShimmerDb);
  CHECK(std::abs(db - 1.0) <= 0.1);
}

TEST_CASE("measures are invariant to global gain") {
  const Train base{.periods = {1.0, 1.02, 0.99}, .amps = {1.0, 0.85, 0.93}};
  Train quiet = base;
  quiet.amplitude *= 0.5;
  const auto a = frames_of(train(base));
  const auto b = frames_of(train(quiet));
  REQUIRE(a.size() == b.size());
  for (std::size_t t = 0; t < a.size(); ++t) {
    CHECK(std::abs(a[t].jitter_rel_pct - b[t].jitter_rel_pct) <= 1e-9);
    CHECK(std::abs(a[t].jitter_abs_s - b[t].jitter_abs_s) <= 1e-9);
    CHECK(std::abs(a[t].shimmer_db - b[t].shimmer_db) <= 1e-9);
    CHECK(std::abs(a[t].shimmer_rel_pct - b[t].shimmer_rel_pct) <= 1e-9);
  }
}

TEST_CASE("jitter is measured in seconds, not samples") {
  const auto hi = train({.periods = {1.0, 1.02}});
  const double a = interior_mean(frames_of(hi), pvq::VqMeasure::kJitterRel);
  const double b = interior_mean(frames_of(pvq::resample(hi, 8000)), pvq::VqMeasure::kJitterRel);
  CHECK(std::abs(a - b) < 0.1 * a);
}

TEST_CASE("measures are finite and nonnegative on noise and silence") {
  pvq::SynthSpec s;
  s.kind = pvq::SynthKind::kWhiteNoise;
  s.duration_s = 2.0;
  s.seed = 9;
  pvq::AudioBuffer silence;
  silence.samples.assign(20000, 0.0f);
  for (const auto& a : {pvq::synth(s).audio, silence}) {
    for (const auto& f : frames_of(a)) {
      for (auto m : {pvq::VqMeasure::kJitterAbs, pvq::VqMeasure::kJitterRel, pvq::VqMeasure::kShimmerDb,
                     pvq::VqMeasure::kShimmerRel}) {
        CHECK(std::isfinite(f.get(m)));
        CHECK(f.get(m) >= 0.0);
      }
    }
  }
}

TEST_CASE("unvoiced cycles are excluded and sparse windows emit zero") {
  pvq::PeriodMarks marks;
  // Two voiced cycles separated by an unvoiced one: no adjacent voiced pair.
  marks.cycles = {{0.10, 0.010, 1.0, 2.0, true}, {0.11, 0.012, 0.5, 0.0, false},
                  {0.122, 0.010, 1.0, 2.0, true}};
  const auto layout = pvq::FrameLayout::from(pvq::FrameSpec{}, 8000, 16000);
  for (const auto& f : pvq::voice_quality_track(marks, layout, 0.5)) {
    CHECK(f.jitter_rel_pct == 0.0);
    CHECK(f.shimmer_rel_pct == 0.0);
  }
  marks.cycles[1].voiced = true;
  const auto f = pvq::voice_quality_track(marks, layout, 0.5);
  CHECK(f[5].jitter_abs_s == doctest::Approx(0.002));
}

TEST_CASE("extract_vq output layout") {
  const auto a = train({.duration = 1.0});
  const pvq::PitchConfig cfg;
  const auto track = pvq::extract_pitch(a, cfg);
  const std::vector<pvq::VqMeasure> which{pvq::VqMeasure::kJitterRel, pvq::VqMeasure::kShimmerRel};
  const auto m = pvq::extract_vq(a, track, cfg, which);
  CHECK(m.rows() == track.size());
  CHECK(m.columns == std::vector<std::string>{"jitter_rel", "shimmer_rel"});
  auto shorter = track;
  shorter.frames.pop_back();
  CHECK_THROWS_AS(pvq::extract_vq(a, shorter, cfg, which), pvq::Error);
  CHECK(pvq::parse_vq_measure("shimmer_db") == pvq::VqMeasure::kShimmerDb);
  CHECK(!pvq::parse_vq_measure("nope").has_value());
}
