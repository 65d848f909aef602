#include "pvq/lexicon.h"

#include <fstream>
#include <sstream>

#include "pvq/error.h"

namespace pvq {

void Lexicon::add(std::string_view word, std::vector<int> tokens, const TokenSet& token_set) {
  if (word.empty()) throw Error(ErrorCode::kInvalidArgument, "lexicon: empty word");
  if (tokens.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "lexicon: empty spelling for '" + std::string(word) + "'");
  }
  for (int t : tokens) {
    if (t < 0 || static_cast<std::size_t>(t) >= token_set.size()) {
      throw Error(ErrorCode::kInvalidArgument, "lexicon: token id out of range");
    }
    if (t == token_set.silence()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "lexicon: spelling of '" + std::string(word) + "' contains the silence token");
    }
  }
  auto [it, inserted] = index_.emplace(std::string(word), static_cast<int>(words_.size()));
  if (inserted) words_.emplace_back(word);
  spellings_.push_back({it->second, std::move(tokens)});
}

std::optional<int> Lexicon::find(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Lexicon load_lexicon(const std::filesystem::path& path, const TokenSet& tokens) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, path.string() + ": cannot open lexicon");
  Lexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) throw Error(ErrorCode::kFormat, where + "expected word<TAB>spelling");
    std::istringstream spelling(line.substr(tab + 1));
    std::vector<int> ids;
    std::string tok;
    while (spelling >> tok) {
      const auto id = tokens.find(tok);
      if (!id) throw Error(ErrorCode::kFormat, where + "unknown token '" + tok + "'");
      ids.push_back(*id);
    }
    try {
      lex.add(line.substr(0, tab), std::move(ids), tokens);
    } catch (const Error& e) {
      throw Error(ErrorCode::kFormat, where + e.what());
    }
  }
  return lex;
}

}  // namespace pvq
