#include "pvq/ngram_lm.h"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pvq/error.h"

namespace pvq {
namespace {

bool parse_double(const std::string& s, double* out) {
  char* end = nullptr;
  *out = std::strtod(s.c_str(), &end);
  return !s.empty() && end == s.c_str() + s.size() && std::isfinite(*out);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string NGramLM::key(std::span<const int> ids) {
  std::string k(ids.size() * sizeof(int), '\0');
  if (!ids.empty()) std::memcpy(k.data(), ids.data(), k.size());
  return k;
}

const NGramLM::Entry* NGramLM::lookup(std::span<const int> ngram) const {
  if (ngram.empty() || static_cast<int>(ngram.size()) > order()) return nullptr;
  const auto& table = grams_[ngram.size() - 1];
  const auto it = table.find(key(ngram));
  return it == table.end() ? nullptr : &it->second;
}

std::optional<int> NGramLM::find(std::string_view word) const {
  const auto it = vocab_index_.find(std::string(word));
  if (it == vocab_index_.end()) return std::nullopt;
  return it->second;
}

int NGramLM::index(std::string_view word) const {
  if (const auto id = find(word)) return *id;
  return unk_;
}

std::optional<int> NGramLM::unk() const {
  if (unk_ == kNoWord) return std::nullopt;
  return unk_;
}

std::size_t NGramLM::count(int n) const {
  if (n < 1 || n > order()) return 0;
  return gram_list_[static_cast<std::size_t>(n - 1)].size();
}

bool NGramLM::contains(std::span<const int> ngram) const { return lookup(ngram) != nullptr; }

double NGramLM::backoff(std::span<const int> ngram) const {
  const Entry* e = lookup(ngram);
  return e ? e->backoff : 0.0;
}

double NGramLM::score(std::span<const int> history, int word) const {
  if (word == kNoWord || order() == 0) return kUnknownLogProb;
  const std::size_t keep = std::min(history.size(), static_cast<std::size_t>(order() - 1));
  history = history.subspan(history.size() - keep);
  std::vector<int> ngram;
  double bo = 0.0;
  for (std::size_t start = 0; start <= history.size(); ++start) {
    const auto ctx = history.subspan(start);
    ngram.assign(ctx.begin(), ctx.end());
    ngram.push_back(word);
    if (const Entry* e = lookup(ngram)) return bo + e->log_prob;
    if (!ctx.empty()) bo += backoff(ctx);
  }
  return kUnknownLogProb;
}

double NGramLM::score(const std::vector<std::string>& history, std::string_view word) const {
  std::vector<int> ids;
  ids.reserve(history.size());
  for (const auto& w : history) ids.push_back(index(w));
  return score(ids, index(word));
}

std::vector<std::vector<int>> NGramLM::histories() const {
  std::vector<std::vector<int>> out{{}};
  for (int n = 1; n < order(); ++n) {
    for (const auto& g : gram_list_[static_cast<std::size_t>(n - 1)]) out.push_back(g);
  }
  return out;
}

NGramLM NGramLM::parse_arpa(std::istream& in, const std::string& name) {
  NGramLM lm;
  std::string raw;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::kFormat, name + ":" + std::to_string(line_no) + ": " + what);
  };
  auto next_line = [&](std::string* out) {
    while (std::getline(in, raw)) {
      ++line_no;
      *out = trim(raw);
      if (!out->empty()) return true;
    }
    return false;
  };

  std::string line;
  bool found = false;
  while (next_line(&line)) {
    if (line == "\\data\\") {
      found = true;
      break;
    }
  }
  if (!found) fail("missing \\data\\ section");

  std::vector<std::size_t> counts;
  while (true) {
    if (!next_line(&line)) fail("unexpected end of file in \\data\\ section");
    if (line.rfind("ngram ", 0) != 0) break;
    const std::string count_field = trim(line.substr(6));
    const auto eq = count_field.find('=');
    if (eq == std::string::npos) fail("malformed count line '" + line + "'");
    const std::string n_str = trim(count_field.substr(0, eq));
    const std::string c_str = trim(count_field.substr(eq + 1));
    std::size_t n = 0;
    std::size_t c = 0;
    const auto r1 = std::from_chars(n_str.data(), n_str.data() + n_str.size(), n);
    const auto r2 = std::from_chars(c_str.data(), c_str.data() + c_str.size(), c);
    if (r1.ec != std::errc() || r1.ptr != n_str.data() + n_str.size() || r2.ec != std::errc() ||
        r2.ptr != c_str.data() + c_str.size()) {
      fail("malformed count line '" + line + "'");
    }
    if (n != counts.size() + 1) fail("n-gram orders must be listed as 1, 2, ...");
    counts.push_back(c);
  }
  if (counts.empty()) fail("no n-gram counts in \\data\\ section");
  const std::size_t order = counts.size();
  lm.grams_.resize(order);
  lm.gram_list_.resize(order);

  for (std::size_t n = 1; n <= order; ++n) {
    if (line != "\\" + std::to_string(n) + "-grams:") {
      fail("expected \\" + std::to_string(n) + "-grams:, found '" + line + "'");
    }
    std::size_t seen = 0;
    while (true) {
      if (!next_line(&line)) fail("unexpected end of file in " + std::to_string(n) + "-grams");
      if (line.front() == '\\') break;
      std::istringstream fields(line);
      std::vector<std::string> parts;
      std::string f;
      while (fields >> f) parts.push_back(f);
      if (parts.size() != n + 1 && parts.size() != n + 2) {
        fail("expected " + std::to_string(n) + " words per line");
      }
      Entry e;
      if (!parse_double(parts[0], &e.log_prob)) fail("bad probability '" + parts[0] + "'");
      if (e.log_prob > 0.0) fail("log10 probability must be <= 0");
      if (parts.size() == n + 2 && !parse_double(parts[n + 1], &e.backoff)) {
        fail("bad backoff weight '" + parts[n + 1] + "'");
      }
      std::vector<int> ids;
      for (std::size_t i = 1; i <= n; ++i) {
        const std::string& w = parts[i];
        if (n == 1) {
          if (lm.vocab_index_.count(w)) fail("duplicate unigram '" + w + "'");
          lm.vocab_index_.emplace(w, static_cast<int>(lm.vocab_.size()));
          lm.vocab_.push_back(w);
        }
        const auto it = lm.vocab_index_.find(w);
        if (it == lm.vocab_index_.end()) fail("word '" + w + "' has no unigram entry");
        ids.push_back(it->second);
      }
      if (!lm.grams_[n - 1].emplace(key(ids), e).second) fail("duplicate n-gram");
      lm.gram_list_[n - 1].push_back(std::move(ids));
      ++seen;
    }
    if (seen != counts[n - 1]) {
      fail(std::to_string(n) + "-grams: header declares " + std::to_string(counts[n - 1]) +
           " entries, found " + std::to_string(seen));
    }
  }
  if (line != "\\end\\") fail("expected \\end\\, found '" + line + "'");

  lm.bos_ = lm.find("<s>").value_or(kNoWord);
  lm.eos_ = lm.find("</s>").value_or(kNoWord);
  lm.unk_ = lm.find("<unk>").value_or(kNoWord);
  return lm;
}

NGramLM load_arpa(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, path.string() + ": cannot open language model");
  return NGramLM::parse_arpa(in, path.string());
}

double lm_score(const NGramLM& lm, const std::vector<std::string>& history, std::string_view word) {
  return lm.score(history, word);
}

}  // namespace pvq
