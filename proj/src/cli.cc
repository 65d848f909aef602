#include "pvq/cli.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "pvq/audio.h"
#include "pvq/decoder.h"
#include "pvq/error.h"
#include "pvq/feature_matrix.h"
#include "pvq/features.h"
#include "pvq/lexicon.h"
#include "pvq/ngram_lm.h"
#include "pvq/pitch.h"
#include "pvq/synth.h"
#include "pvq/token_set.h"
#include "pvq/voice_quality.h"
#include "pvq/wer.h"

namespace pvq {
namespace {

constexpr const char* kSourcesFooter =
    "Default sources: recipe = published experimental setup; kaldi = Kaldi pitch tracker;\n"
    "convention = common front-end practice; calibrated = tuned on synthetic test signals.\n"
    "Any long option may also be given as key=value in a --flagsfile; command-line flags win.";

// Validation failures found before any work starts.
class UsageError : public Error {
 public:
  using Error::Error;
};

template <typename F>
void check_usage(F&& f) {
  try {
    f();
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError(e.code(), e.what());
  }
}

std::string describe(const std::string& what, const std::string& def, const char* source) {
  return what + " [default " + def + "; " + source + "]";
}

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

std::size_t default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

WindowType parse_window(const std::string& name) {
  if (name == "hamming") return WindowType::kHamming;
  if (name == "hanning" || name == "hann") return WindowType::kHanning;
  if (name == "rectangular" || name == "rect") return WindowType::kRectangular;
  throw UsageError(ErrorCode::kInvalidArgument, "unknown window '" + name + "'");
}

MatrixFormat parse_format(const std::string& name) {
  if (name == "pft" || name == "binary") return MatrixFormat::kBinary;
  if (name == "csv") return MatrixFormat::kCsv;
  throw UsageError(ErrorCode::kInvalidArgument, "unknown matrix format '" + name + "'");
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::kIo, path.string() + ": cannot open for writing");
  return f;
}

// Writes to `path`, or to `out` when the path is empty or "-".
template <typename F>
void emit(const std::string& path, std::ostream& out, F&& write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream f = open_output(path);
  write(f);
  if (!f) throw Error(ErrorCode::kIo, path + ": write failed");
}

struct FrameFlags {
  double window_ms = 25.0;
  double stride_ms = 10.0;
  std::string window = "hamming";
  double preemphasis = 0.97;

  void add(CLI::App* app) {
    app->add_option("--window-ms", window_ms, describe("analysis window length in ms", "25", "recipe"));
    app->add_option("--stride-ms", stride_ms, describe("frame stride in ms", "10", "recipe"));
    app->add_option("--window", window,
                    describe("MFSC window: hamming, hanning or rectangular", "hamming", "convention"));
    app->add_option("--preemphasis", preemphasis,
                    describe("MFSC preemphasis coefficient", "0.97", "convention"));
  }
  FrameSpec spec() const {
    FrameSpec s;
    s.window_ms = window_ms;
    s.stride_ms = stride_ms;
    s.window = parse_window(window);
    s.preemphasis = preemphasis;
    return s;
  }
};

struct PitchFlags {
  PitchConfig cfg;

  void add(CLI::App* app) {
    app->add_option("--min-f0", cfg.min_f0_hz, describe("lowest f0 searched, Hz", "50", "kaldi"));
    app->add_option("--max-f0", cfg.max_f0_hz, describe("highest f0 searched, Hz", "400", "kaldi"));
    app->add_option("--internal-sr", cfg.internal_sr_hz,
                    describe("pitch analysis rate, Hz", "4000", "kaldi"));
    app->add_option("--penalty-factor", cfg.penalty_factor,
                    describe("Viterbi log-lag jump penalty", "0.1", "kaldi"));
    app->add_option("--nccf-ballast", cfg.nccf_ballast,
                    describe("NCCF energy ballast", "7000", "kaldi"));
    app->add_option("--soft-min-f0", cfg.soft_min_f0_hz,
                    describe("low-f0 de-weighting of NCCF before Viterbi, Hz", "10", "kaldi"));
    app->add_option("--lag-resolution", cfg.lag_resolution,
                    describe("log-lag grid spacing of the refined search", "0.005", "kaldi"));
    app->add_option("--upsample-filter-width", cfg.upsample_filter_width,
                    describe("sinc interpolation half-width onto the refined grid", "5", "kaldi"));
    app->add_option("--pov-threshold", cfg.pov_threshold,
                    describe("POV feature above which a cycle counts as voiced",
                             fmt(PitchConfig{}.pov_threshold), "calibrated"));
  }
  PitchConfig with_frames(const FrameSpec& frame) const {
    PitchConfig c = cfg;
    c.window_ms = frame.window_ms;
    c.stride_ms = frame.stride_ms;
    return c;
  }
};

// ---------------------------------------------------------------- extract

struct ExtractCmd {
  std::string input;
  std::string output;
  std::string list;
  std::string out_dir;
  std::string features = "mfsc";
  std::string format = "pft";
  std::size_t num_filters = 40;
  double low_hz = 0.0;
  double high_hz = -1.0;
  double vq_window_ms = 500.0;
  std::size_t jobs = default_jobs();
  FrameFlags frame;
  PitchFlags pitch;

  void add(CLI::App* app) {
    app->add_option("-i,--input", input, "input WAV file");
    app->add_option("-o,--output", output, "output matrix (default: input with .pft or .csv)");
    app->add_option("--list", list, "dataset list: id<TAB>wav<TAB>duration[<TAB>transcript]");
    app->add_option("--out-dir", out_dir, "output directory for --list (one <id>.pft each)");
    app->add_option("--features,--config", features,
                    describe("feature set: mfsc, mfsc+pitch, mfsc+pitch+jitter, "
                             "mfsc+pitch+shimmer, mfsc+pitch+jitter+shimmer, or 1-5",
                             "mfsc", "recipe"));
    app->add_option("--format", format, describe("output format: pft or csv", "pft", "convention"));
    app->add_option("--num-filters", num_filters, describe("mel filters", "40", "recipe"));
    app->add_option("--low-hz", low_hz, describe("lowest filterbank edge, Hz", "0", "convention"));
    app->add_option("--high-hz", high_hz,
                    describe("highest filterbank edge, Hz; negative means Nyquist", "-1", "convention"));
    app->add_option("--vq-window-ms", vq_window_ms,
                    describe("jitter/shimmer averaging window in ms", "500", "recipe"));
    app->add_option("-j,--jobs", jobs, describe("worker threads for --list", "all cores", "convention"));
    frame.add(app);
    pitch.add(app);
  }

  FeatureConfig config() const {
    FeatureConfig cfg;
    cfg.set = parse_feature_set(features);
    cfg.frame = frame.spec();
    cfg.num_filters = num_filters;
    cfg.low_hz = low_hz;
    cfg.high_hz = high_hz;
    cfg.pitch = pitch.with_frames(cfg.frame);
    cfg.vq_window_s = vq_window_ms / 1000.0;
    return cfg;
  }

  int run(std::ostream& out, std::ostream& err) const {
    FeatureConfig cfg;
    MatrixFormat fmt_kind = MatrixFormat::kBinary;
    check_usage([&] {
      cfg = config();
      cfg.validate();
      cfg.frame.validate(16000);
      fmt_kind = parse_format(format);
      if (input.empty() == list.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "give exactly one of --input and --list");
      }
      if (!list.empty() && out_dir.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "--list needs --out-dir");
      }
      if (!list.empty() && fmt_kind != MatrixFormat::kBinary) {
        throw Error(ErrorCode::kInvalidArgument, "--list writes .pft files only");
      }
      if (jobs < 1) throw Error(ErrorCode::kInvalidArgument, "--jobs must be >= 1");
    });

    if (!input.empty()) {
      const AudioBuffer audio = load_wav(input);
      const FeatureMatrix m = extract(audio, cfg);
      std::filesystem::path dest = output;
      if (dest.empty()) {
        dest = input;
        dest.replace_extension(fmt_kind == MatrixFormat::kCsv ? ".csv" : ".pft");
      }
      write_matrix(m, dest, fmt_kind);
      out << dest.string() << ": " << m.rows() << " frames x " << m.cols() << " columns\n";
      return kExitOk;
    }

    const auto entries = read_dataset_list(list);
    const BatchSummary s = batch_extract(entries, cfg, out_dir, jobs);
    for (const auto& f : s.failures) {
      err << "ERROR utterance " << f.id << ": " << f.reason << "\n";
    }
    out << "extracted " << s.succeeded << "/" << s.total << " utterances into " << out_dir << "\n";
    return s.failures.empty() ? kExitOk : kExitDataError;
  }
};

// ---------------------------------------------------------------- pitch, vq

struct PitchCmd {
  std::string input;
  std::string output;
  FrameFlags frame;
  PitchFlags pitch;

  void add(CLI::App* app) {
    app->add_option("-i,--input", input, "input WAV file")->required();
    app->add_option("-o,--output", output, "output CSV (default: stdout)");
    frame.add(app);
    pitch.add(app);
  }

  int run(std::ostream& out, std::ostream&) const {
    PitchConfig cfg;
    check_usage([&] {
      cfg = pitch.with_frames(frame.spec());
      cfg.validate();
    });
    const PitchTrack track = extract_pitch(load_wav(input), cfg);
    emit(output, out, [&](std::ostream& o) { write_pitch_csv(track, o); });
    return kExitOk;
  }
};

struct VqCmd {
  std::string input;
  std::string output;
  std::string cycles;
  double vq_window_ms = 500.0;
  FrameFlags frame;
  PitchFlags pitch;

  void add(CLI::App* app) {
    app->add_option("-i,--input", input, "input WAV file")->required();
    app->add_option("-o,--output", output, "per-frame jitter/shimmer CSV (default: stdout)");
    app->add_option("--cycles", cycles, "also write the marked glottal cycles to this CSV");
    app->add_option("--vq-window-ms", vq_window_ms,
                    describe("averaging window in ms", "500", "recipe"));
    frame.add(app);
    pitch.add(app);
  }

  int run(std::ostream& out, std::ostream&) const {
    PitchConfig cfg;
    check_usage([&] {
      cfg = pitch.with_frames(frame.spec());
      cfg.validate();
      if (!(vq_window_ms > 0.0)) {
        throw Error(ErrorCode::kInvalidArgument, "--vq-window-ms must be positive");
      }
    });
    const AudioBuffer audio = load_wav(input);
    const PitchTrack track = extract_pitch(audio, cfg);
    const PeriodMarks marks = mark_periods(audio, track, cfg);
    const auto frames = voice_quality_track(marks, track.layout, vq_window_ms / 1000.0);
    emit(output, out, [&](std::ostream& o) {
      o << "time_s,jitter_abs_s,jitter_rel_pct,shimmer_db,shimmer_rel_pct\n";
      char line[160];
      for (std::size_t t = 0; t < frames.size(); ++t) {
        const auto& f = frames[t];
        std::snprintf(line, sizeof line, "%.3f,%.9g,%.9g,%.9g,%.9g\n", track.layout.center_s(t),
                      f.jitter_abs_s, f.jitter_rel_pct, f.shimmer_db, f.shimmer_rel_pct);
        o << line;
      }
    });
    if (!cycles.empty()) {
      std::ofstream f = open_output(cycles);
      write_cycles_csv(marks, f);
    }
    return kExitOk;
  }
};

// ---------------------------------------------------------------- synth

struct SynthCmd {
  std::string kind = "sine";
  double f0 = 100.0;
  std::optional<double> f0_end;
  double amplitude = 0.5;
  std::vector<double> amp_pattern{1.0};
  std::vector<double> period_pattern{1.0};
  double duration_s = 1.0;
  int sample_rate_hz = 16000;
  std::uint64_t seed = 0;
  std::string output;
  std::string truth;
  std::string encoding = "float32";

  void add(CLI::App* app) {
    app->add_option("--kind", kind,
                    describe("sine, chirp, pulse_train, white_noise or silence", "sine", "convention"));
    app->add_option("--f0", f0, describe("f0 (start of sweep), Hz", "100", "convention"));
    app->add_option("--f0-end", f0_end, "f0 at the end of a chirp or pulse-train sweep [default --f0]");
    app->add_option("--amplitude", amplitude, describe("peak amplitude", "0.5", "convention"));
    app->add_option("--amp-pattern", amp_pattern,
                    describe("per-cycle pulse gains, cycled", "1", "convention"))
        ->delimiter(',');
    app->add_option("--period-pattern", period_pattern,
                    describe("per-cycle period multipliers, cycled", "1", "convention"))
        ->delimiter(',');
    app->add_option("--dur", duration_s, describe("duration in seconds", "1", "convention"));
    app->add_option("--sr", sample_rate_hz, describe("sample rate, Hz", "16000", "convention"));
    app->add_option("--seed", seed, describe("noise seed", "0", "convention"));
    app->add_option("-o,--output", output, "output WAV file")->required();
    app->add_option("--truth", truth, "ground-truth JSON (default: output with .json)");
    app->add_option("--encoding", encoding,
                    describe("WAV sample format: float32 or pcm16", "float32", "convention"));
  }

  int run(std::ostream& out, std::ostream&) const {
    SynthSpec spec;
    WavEncoding enc = WavEncoding::kFloat32;
    check_usage([&] {
      spec.kind = parse_synth_kind(kind);
      spec.f0_start_hz = f0;
      spec.f0_end_hz = f0_end.value_or(f0);
      spec.amplitude = amplitude;
      spec.amplitude_pattern = amp_pattern;
      spec.period_pattern = period_pattern;
      spec.duration_s = duration_s;
      spec.sample_rate_hz = sample_rate_hz;
      spec.seed = seed;
      spec.validate();
      if (encoding == "pcm16") {
        enc = WavEncoding::kPcm16;
      } else if (encoding != "float32") {
        throw Error(ErrorCode::kInvalidArgument, "unknown encoding '" + encoding + "'");
      }
    });
    const SynthResult r = synth(spec);
    write_wav(r.audio, output, enc);
    std::filesystem::path json_path = truth;
    if (json_path.empty()) {
      json_path = output;
      json_path.replace_extension(".json");
    }
    std::ofstream j = open_output(json_path);
    j << ground_truth_json(spec, r.truth);
    out << output << ": " << r.audio.size() << " samples at " << r.audio.sample_rate_hz << " Hz\n";
    return kExitOk;
  }
};

// ---------------------------------------------------------------- decode

struct DecodeCmd {
  std::vector<std::string> inputs;
  std::string tokens_path;
  std::string silence{kDefaultSilenceToken};
  std::string lexicon_path;
  std::string lm_path;
  std::string output;
  bool greedy = false;
  std::size_t jobs = default_jobs();
  DecoderOptions opts;

  void add(CLI::App* app) {
    app->add_option("-i,--input", inputs, "emission matrices (.pft), one per utterance")
        ->required();
    app->add_option("--tokens", tokens_path, "token list, one per line, in emission column order")
        ->required();
    app->add_option("--silence-token", silence,
                    describe("word separator token", "|", "convention"));
    app->add_option("--lexicon", lexicon_path, "lexicon: word<TAB>space-separated tokens");
    app->add_option("--lm", lm_path, "ARPA n-gram language model");
    app->add_flag("--greedy", greedy, "greedy best path instead of beam search");
    app->add_option("-o,--output", output, "hypotheses as id<TAB>text (default: stdout)");
    app->add_option("-j,--jobs", jobs, describe("worker threads", "all cores", "convention"));
    app->add_option("--lm-weight", opts.lm_weight, describe("LM weight", "2.5", "recipe"));
    app->add_option("--word-score", opts.word_score, describe("per-word bonus", "1", "recipe"));
    app->add_option("--beam-size", opts.beam_size, describe("hypotheses kept per frame", "2500", "recipe"));
    app->add_option("--beam-threshold", opts.beam_threshold,
                    describe("score gap to the best hypothesis kept so far in the frame", "25", "recipe"));
    app->add_option("--sil-weight", opts.sil_weight,
                    describe("score per silence frame", "-0.4", "recipe"));
  }

  int run(std::ostream& out, std::ostream& err) const {
    check_usage([&] {
      opts.validate();
      if (!greedy && (lexicon_path.empty() || lm_path.empty())) {
        throw Error(ErrorCode::kInvalidArgument, "beam search needs --lexicon and --lm");
      }
      if (jobs < 1) throw Error(ErrorCode::kInvalidArgument, "--jobs must be >= 1");
    });
    const TokenSet tokens = load_tokens(tokens_path, silence);
    std::optional<Lexicon> lexicon;
    std::optional<NGramLM> lm;
    std::optional<LexiconDecoder> decoder;
    if (!greedy) {
      lexicon = load_lexicon(lexicon_path, tokens);
      lm = load_arpa(lm_path);
      decoder.emplace(tokens, *lexicon, *lm, opts);
    }

    std::vector<std::string> texts(inputs.size());
    std::vector<std::string> errors(inputs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < inputs.size(); i = next++) {
        try {
          const FeatureMatrix m = read_matrix(inputs[i]);
          EmissionMatrix e(m.rows(), m.cols());
          std::copy(m.values.data().begin(), m.values.data().end(), e.data().begin());
          if (greedy) {
            texts[i] = greedy_decode(e, tokens);
          } else {
            const DecodeResult r = decoder->decode(e);
            if (!r.found) throw Error(ErrorCode::kUndefined, "no lexicon-legal path survived the beam");
            for (const auto& w : r.words) texts[i] += (texts[i].empty() ? "" : " ") + w;
          }
        } catch (const std::exception& ex) {
          errors[i] = ex.what();
        }
      }
    };
    std::vector<std::thread> pool;
    const std::size_t n_threads = std::min(jobs, std::max<std::size_t>(inputs.size(), 1));
    for (std::size_t j = 1; j < n_threads; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    bool failed = false;
    emit(output, out, [&](std::ostream& o) {
      for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (!errors[i].empty()) {
          err << "ERROR utterance " << inputs[i] << ": " << errors[i] << "\n";
          failed = true;
          continue;
        }
        o << std::filesystem::path(inputs[i]).stem().string() << "\t" << texts[i] << "\n";
      }
    });
    return failed ? kExitDataError : kExitOk;
  }
};

// ---------------------------------------------------------------- wer

struct WerCmd {
  std::string ref;
  std::string hyp;
  bool normalize = true;

  void add(CLI::App* app) {
    app->add_option("--ref", ref, "reference transcripts, id<TAB>text")->required();
    app->add_option("--hyp", hyp, "hypothesis transcripts, id<TAB>text")->required();
    app->add_flag("--normalize,!--no-normalize", normalize,
                  describe("lowercase and strip punctuation before scoring", "on", "convention"));
  }

  int run(std::ostream& out, std::ostream&) const {
    const auto refs = read_transcripts(ref);
    const auto hyps = read_transcripts(hyp);
    std::map<std::string, std::string> hyp_text;
    for (const auto& h : hyps) hyp_text[h.id] = h.text;
    for (const auto& h : hyps) {
      const bool known = std::any_of(refs.begin(), refs.end(),
                                     [&](const Transcript& r) { return r.id == h.id; });
      if (!known) {
        throw Error(ErrorCode::kFormat, hyp + ": utterance '" + h.id + "' has no reference");
      }
    }
    auto words = [&](const std::string& text) {
      return split_words(normalize ? normalize_text(text) : text);
    };
    WerReport w;
    WerReport c;
    for (const auto& r : refs) {
      const auto it = hyp_text.find(r.id);
      const auto rw = words(r.text);
      const auto hw = words(it == hyp_text.end() ? std::string() : it->second);
      w += wer(rw, hw);
      c += cer(rw, hw);
    }
    char line[200];
    std::snprintf(line, sizeof line, "WER %.2f (S=%zu I=%zu D=%zu N=%zu, %zu utterances)\n",
                  w.wer_pct(), w.substitutions, w.insertions, w.deletions, w.reference_words,
                  refs.size());
    out << line;
    std::snprintf(line, sizeof line, "CER %.2f (S=%zu I=%zu D=%zu N=%zu)\n", c.wer_pct(),
                  c.substitutions, c.insertions, c.deletions, c.reference_words);
    out << line;
    return kExitOk;
  }
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Replaces --flagsfile PATH with --key=value tokens placed straight after the
// subcommand, so explicit flags (parsed later, last one wins) override them.
std::vector<std::string> expand_flagsfile(const std::vector<std::string>& args, CLI::App& app) {
  if (args.empty()) return args;
  std::vector<std::string> rest;
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--flagsfile") {
      if (i + 1 >= args.size()) throw UsageError(ErrorCode::kInvalidArgument, "--flagsfile needs a path");
      path = args[++i];
    } else if (args[i].rfind("--flagsfile=", 0) == 0) {
      path = args[i].substr(12);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return args;
  CLI::App* sub = app.get_subcommand_no_throw(args[0]);
  if (!sub) return args;

  std::ifstream in(path);
  if (!in) throw UsageError(ErrorCode::kIo, path + ": cannot open flags file");
  std::vector<std::string> out{args[0]};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(ErrorCode::kFormat, where + "expected key=value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.empty() || key == "flagsfile" || key == "help" ||
        sub->get_option_no_throw("--" + key) == nullptr) {
      throw UsageError(ErrorCode::kInvalidArgument,
                       where + "unknown key '" + key + "' for '" + args[0] + "'");
    }
    out.push_back("--" + key + "=" + value);
  }
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Speech front-end with pitch and voice-quality features, n-gram beam decoding "
               "and error-rate scoring."};
  app.name("pvq");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.footer(kSourcesFooter);

  ExtractCmd extract_cmd;
  PitchCmd pitch_cmd;
  VqCmd vq_cmd;
  SynthCmd synth_cmd;
  DecodeCmd decode_cmd;
  WerCmd wer_cmd;
  std::string flagsfile_unused;
  auto add_sub = [&](const char* name, const char* help, auto& cmd) {
    CLI::App* sub = app.add_subcommand(name, help);
    cmd.add(sub);
    sub->add_option("--flagsfile", flagsfile_unused, "key=value defaults, one per line");
    sub->footer(kSourcesFooter);
    return sub;
  };
  CLI::App* extract_app = add_sub("extract", "compute feature matrices from WAV audio", extract_cmd);
  CLI::App* pitch_app = add_sub("pitch", "write a pitch track as CSV", pitch_cmd);
  CLI::App* vq_app = add_sub("vq", "write frame-level jitter and shimmer as CSV", vq_cmd);
  CLI::App* synth_app = add_sub("synth", "generate a test signal and its ground truth", synth_cmd);
  CLI::App* decode_app = add_sub("decode", "decode emission matrices into words", decode_cmd);
  CLI::App* wer_app = add_sub("wer", "score hypotheses against references", wer_cmd);

  try {
    std::vector<std::string> expanded = expand_flagsfile(args, app);
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "ERROR usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "ERROR " << error_code_name(e.code()) << ": " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (extract_app->parsed()) return extract_cmd.run(out, err);
    if (pitch_app->parsed()) return pitch_cmd.run(out, err);
    if (vq_app->parsed()) return vq_cmd.run(out, err);
    if (synth_app->parsed()) return synth_cmd.run(out, err);
    if (decode_app->parsed()) return decode_cmd.run(out, err);
    if (wer_app->parsed()) return wer_cmd.run(out, err);
  } catch (const UsageError& e) {
    err << "ERROR " << error_code_name(e.code()) << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "ERROR " << error_code_name(e.code()) << ": " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "ERROR internal: " << e.what() << "\n";
    return kExitDataError;
  }
  err << "ERROR usage: no subcommand\n";
  return kExitUsage;
}

}  // namespace pvq
