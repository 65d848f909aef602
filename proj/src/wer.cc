#include "pvq/wer.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "pvq/error.h"

namespace pvq {
namespace {

template <typename T>
WerReport align(const std::vector<T>& ref, const std::vector<T>& hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  std::vector<std::size_t> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  WerReport r;
  r.reference_words = n;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      const bool same = ref[i - 1] == hyp[j - 1];
      r.alignment.push_back({same ? EditOp::kMatch : EditOp::kSubstitution,
                             static_cast<long>(i - 1), static_cast<long>(j - 1)});
      if (!same) ++r.substitutions;
      --i;
      --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      r.alignment.push_back({EditOp::kDeletion, static_cast<long>(i - 1), -1});
      ++r.deletions;
      --i;
    } else {
      r.alignment.push_back({EditOp::kInsertion, -1, static_cast<long>(j - 1)});
      ++r.insertions;
      --j;
    }
  }
  std::reverse(r.alignment.begin(), r.alignment.end());
  return r;
}

std::vector<char32_t> code_points(std::string_view s) {
  std::vector<char32_t> out;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = c;
    if (c >= 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else if (c >= 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if (c >= 0xC0) {
      len = 2;
      cp = c & 0x1F;
    }
    if (i + len > s.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    out.push_back(len == 1 ? c : cp);
    i += len;
  }
  return out;
}

}  // namespace

double WerReport::wer_pct() const {
  if (reference_words == 0) {
    if (errors() == 0) return 0.0;
    throw Error(ErrorCode::kUndefined, "error rate undefined: empty reference, nonempty hypothesis");
  }
  return 100.0 * static_cast<double>(errors()) / static_cast<double>(reference_words);
}

WerReport& WerReport::operator+=(const WerReport& other) {
  substitutions += other.substitutions;
  insertions += other.insertions;
  deletions += other.deletions;
  reference_words += other.reference_words;
  alignment.clear();
  return *this;
}

WerReport wer(const std::vector<std::string>& reference,
              const std::vector<std::string>& hypothesis) {
  return align(reference, hypothesis);
}

WerReport cer(const std::vector<std::string>& reference,
              const std::vector<std::string>& hypothesis) {
  auto join = [](const std::vector<std::string>& words) {
    std::string s;
    for (const auto& w : words) {
      if (!s.empty()) s.push_back(' ');
      s += w;
    }
    return code_points(s);
  };
  return align(join(reference), join(hypothesis));
}

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c < 0x80) {
      if (c == '\'' || std::isalnum(c) || std::isspace(c)) {
        out.push_back(static_cast<char>(std::tolower(c)));
      } else {
        out.push_back(' ');
      }
      continue;
    }
    if (c == 0xC2 && i + 1 < text.size()) {
      const auto d = static_cast<unsigned char>(text[i + 1]);
      // U+00A0..U+00BF: no-break space, inverted marks, guillemets, symbols.
      if (d >= 0xA0 && d <= 0xBF) {
        out.push_back(' ');
        ++i;
        continue;
      }
    }
    if (c == 0xC3 && i + 1 < text.size()) {
      auto d = static_cast<unsigned char>(text[i + 1]);
      // U+00C0..U+00DE are uppercase Latin-1 letters, except U+00D7.
      if (d >= 0x80 && d <= 0x9E && d != 0x97) d = static_cast<unsigned char>(d + 0x20);
      out.push_back(static_cast<char>(c));
      out.push_back(static_cast<char>(d));
      ++i;
      continue;
    }
    out.push_back(static_cast<char>(c));
  }
  return out;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) words.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return words;
}

std::vector<Transcript> read_transcripts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, path.string() + ": cannot open transcript file");
  std::vector<Transcript> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    const std::size_t tab = line.find('\t');
    Transcript t;
    t.id = line.substr(0, tab);
    if (tab != std::string::npos) t.text = line.substr(tab + 1);
    if (t.id.empty()) throw Error(ErrorCode::kFormat, where + "empty utterance id");
    if (!seen.insert(t.id).second) {
      throw Error(ErrorCode::kFormat, where + "duplicate utterance id '" + t.id + "'");
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace pvq
