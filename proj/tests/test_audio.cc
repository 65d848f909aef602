#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.h"
#include "pvq/audio.h"
#include "pvq/error.h"

namespace {

pvq::AudioBuffer tone(double hz, double seconds, int sr, double amp = 0.5) {
  pvq::AudioBuffer a;
  a.sample_rate_hz = sr;
  const auto n = static_cast<std::size_t>(std::llround(seconds * sr));
  for (std::size_t i = 0; i < n; ++i) {
    a.samples.push_back(static_cast<float>(amp * std::sin(2.0 * std::numbers::pi * hz * i / sr)));
  }
  return a;
}

pvq::ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const pvq::Error& e) {
    return e.code();
  }
  FAIL("expected pvq::Error");
  return pvq::ErrorCode::kInternal;
}

}  // namespace

TEST_CASE("pcm16 wav of 16000 samples loads with its rate") {
  const auto dir = oracle::temp_dir("audio");
  std::vector<std::int16_t> pcm(16000);
  for (std::size_t i = 0; i < pcm.size(); ++i) pcm[i] = static_cast<std::int16_t>(i % 2000 - 1000);
  oracle::write_bytes(dir / "a.wav", oracle::pcm16_wav(pcm, 1, 16000));
  const auto a = pvq::load_wav(dir / "a.wav");
  CHECK(a.size() == 16000);
  CHECK(a.sample_rate_hz == 16000);
  CHECK(a.samples[5] == static_cast<float>(pcm[5] / 32768.0));
}

TEST_CASE("stereo channels are averaged") {
  const auto dir = oracle::temp_dir("audio");
  std::vector<std::int16_t> pcm;
  for (int i = 0; i < 100; ++i) {
    pcm.push_back(16384);
    pcm.push_back(-16384);
  }
  oracle::write_bytes(dir / "s.wav", oracle::pcm16_wav(pcm, 2, 8000));
  const auto a = pvq::load_wav(dir / "s.wav");
  REQUIRE(a.size() == 100);
  for (float v : a.samples) CHECK(v == 0.0f);
}

TEST_CASE("int16 minimum maps to -1 exactly") {
  const auto dir = oracle::temp_dir("audio");
  oracle::write_bytes(dir / "m.wav", oracle::pcm16_wav({-32768, 32767, 0}, 1, 16000));
  const auto a = pvq::load_wav(dir / "m.wav");
  CHECK(a.samples[0] == -1.0f);
  CHECK(a.samples[1] < 1.0f);
  CHECK(a.samples[2] == 0.0f);
}

TEST_CASE("wav writer round trips") {
  const auto dir = oracle::temp_dir("audio");
  const auto a = tone(440.0, 0.1, 16000);
  pvq::write_wav(a, dir / "f.wav", pvq::WavEncoding::kFloat32);
  CHECK(pvq::load_wav(dir / "f.wav").samples == a.samples);

  pvq::write_wav(a, dir / "p.wav", pvq::WavEncoding::kPcm16);
  const auto b = pvq::load_wav(dir / "p.wav");
  REQUIRE(b.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(b.samples[i] - a.samples[i]) <= 1.0 / 32768);
}

TEST_CASE("malformed wav files are rejected") {
  const auto dir = oracle::temp_dir("audio");
  CHECK(code_of([&] { pvq::load_wav(dir / "missing.wav"); }) == pvq::ErrorCode::kIo);

  oracle::write_bytes(dir / "junk.wav", "not a wave file at all, really not");
  CHECK(code_of([&] { pvq::load_wav(dir / "junk.wav"); }) == pvq::ErrorCode::kFormat);

  std::string truncated = oracle::pcm16_wav(std::vector<std::int16_t>(100, 1), 1, 16000);
  truncated.resize(60);
  oracle::write_bytes(dir / "trunc.wav", truncated);
  CHECK(code_of([&] { pvq::load_wav(dir / "trunc.wav"); }) == pvq::ErrorCode::kFormat);

  std::string eight_bit = oracle::pcm16_wav(std::vector<std::int16_t>(10, 1), 1, 16000);
  eight_bit[34] = 8;  // bits per sample
  oracle::write_bytes(dir / "u8.wav", eight_bit);
  try {
    pvq::load_wav(dir / "u8.wav");
    FAIL("expected an error");
  } catch (const pvq::Error& e) {
    CHECK(e.code() == pvq::ErrorCode::kFormat);
    CHECK(std::string(e.what()).find("offset") != std::string::npos);
  }
}

TEST_CASE("resampling to the same rate is a bitwise copy") {
  const auto a = tone(123.0, 0.3, 22050);
  const auto b = pvq::resample(a, 22050);
  CHECK(b.samples == a.samples);
  CHECK(b.sample_rate_hz == 22050);
}

TEST_CASE("100 Hz tone keeps its peak after 16 kHz to 4 kHz") {
  const auto a = tone(100.0, 1.0, 16000);
  const auto b = pvq::resample(a, 4000);
  CHECK(b.sample_rate_hz == 4000);
  const double peak = oracle::dft_peak_hz(b.samples, 4000, 50.0, 150.0, 0.05);
  CHECK(std::abs(peak - 100.0) < 0.5);
}

TEST_CASE("48 kHz to 16 kHz length") {
  const auto a = tone(300.0, 1.0, 48000);
  const auto b = pvq::resample(a, 16000);
  CHECK(std::abs(static_cast<long>(b.size()) - 16000) <= 1);
  pvq::Resampler r(44100, 16000);
  for (std::size_t n : {0u, 1u, 441u, 44100u, 12345u}) {
    CHECK(r.output_length(n) == static_cast<std::size_t>(std::llround(n * 16000.0 / 44100.0)));
  }
}

TEST_CASE("tone survives a resampling round trip within 0.5 Hz") {
  for (auto [src, dst, hz] : {std::tuple{16000, 8000, 440.0}, std::tuple{16000, 4000, 150.0},
                              std::tuple{44100, 16000, 1000.0}}) {
    const auto a = tone(hz, 0.5, src);
    const auto back = pvq::resample(pvq::resample(a, dst), src);
    // Skip filter edges.
    std::span<const float> mid(back.samples.data() + src / 20, back.size() - src / 10);
    const double peak = oracle::dft_peak_hz(mid, src, hz - 5.0, hz + 5.0, 0.01);
    CHECK(std::abs(peak - hz) < 0.5);
  }
}

TEST_CASE("frame count boundary cases") {
  pvq::FrameSpec spec;
  CHECK(spec.window_samples(16000) == 400);
  CHECK(spec.stride_samples(16000) == 160);
  CHECK(spec.num_frames(400, 16000) == 1);
  CHECK(spec.num_frames(560, 16000) == 2);
  CHECK(spec.num_frames(399, 16000) == 0);
}

TEST_CASE("frame count formula over random lengths") {
  std::mt19937 rng(5);
  pvq::FrameSpec spec;
  pvq::AudioBuffer a;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 400 + rng() % 5000;
    const std::size_t expected = (n - 400) / 160 + 1;
    CHECK(spec.num_frames(n, 16000) == expected);
    a.samples.assign(n, 0.25f);
    CHECK(pvq::frame_signal(a, spec).rows() == expected);
  }
}

TEST_CASE("rectangular window without preemphasis returns raw slices") {
  pvq::FrameSpec spec{25.0, 10.0, pvq::WindowType::kRectangular, 0.0};
  std::mt19937 rng(1);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  pvq::AudioBuffer a;
  for (int i = 0; i < 2000; ++i) a.samples.push_back(u(rng));
  const auto frames = pvq::frame_signal(a, spec);
  for (std::size_t t = 0; t < frames.rows(); ++t) {
    for (std::size_t k = 0; k < 400; ++k) CHECK(frames(t, k) == a.samples[t * 160 + k]);
  }
}

TEST_CASE("shifting by one stride shifts the frames") {
  pvq::FrameSpec spec;
  std::mt19937 rng(2);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  pvq::AudioBuffer a;
  for (int i = 0; i < 3000; ++i) a.samples.push_back(u(rng));
  pvq::AudioBuffer shifted = a;
  shifted.samples.erase(shifted.samples.begin(), shifted.samples.begin() + 160);
  const auto f = pvq::frame_signal(a, spec);
  const auto g = pvq::frame_signal(shifted, spec);
  REQUIRE(g.rows() + 1 == f.rows());
  for (std::size_t t = 0; t < g.rows(); ++t) {
    for (std::size_t k = 0; k < 400; ++k) CHECK(g(t, k) == f(t + 1, k));
  }
}

TEST_CASE("framing validation and short input") {
  CHECK(code_of([] { pvq::FrameSpec{10.0, 20.0}.validate(16000); }) ==
        pvq::ErrorCode::kInvalidArgument);
  CHECK(code_of([] { pvq::FrameSpec{0.05, 0.05}.validate(16000); }) ==
        pvq::ErrorCode::kInvalidArgument);
  CHECK(code_of([] { pvq::FrameSpec{25.0, 10.0, pvq::WindowType::kHamming, 1.0}.validate(16000); }) ==
        pvq::ErrorCode::kInvalidArgument);
  pvq::AudioBuffer a;
  a.samples.assign(100, 0.0f);
  CHECK(code_of([&] { pvq::frame_signal(a, pvq::FrameSpec{}); }) == pvq::ErrorCode::kTooShort);
}

TEST_CASE("window shapes") {
  const auto h = pvq::make_window(pvq::WindowType::kHamming, 5);
  CHECK(h[0] == doctest::Approx(0.08));
  CHECK(h[2] == doctest::Approx(1.0));
  const auto r = pvq::make_window(pvq::WindowType::kRectangular, 4);
  for (double v : r) CHECK(v == 1.0);
}
