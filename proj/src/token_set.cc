#include "pvq/token_set.h"

#include <fstream>

#include "pvq/error.h"

namespace pvq {

TokenSet::TokenSet(std::vector<std::string> tokens, std::string_view silence)
    : tokens_(std::move(tokens)) {
  if (tokens_.empty()) throw Error(ErrorCode::kInvalidArgument, "token set is empty");
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) throw Error(ErrorCode::kInvalidArgument, "empty token");
    if (!index_.emplace(tokens_[i], static_cast<int>(i)).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate token '" + tokens_[i] + "'");
    }
  }
  const auto sil = find(silence);
  if (!sil) {
    throw Error(ErrorCode::kInvalidArgument,
                "silence token '" + std::string(silence) + "' missing from token set");
  }
  silence_ = *sil;
}

std::optional<int> TokenSet::find(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenSet load_tokens(const std::filesystem::path& path, std::string_view silence) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, path.string() + ": cannot open token file");
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    tokens.push_back(line);
  }
  try {
    return TokenSet(std::move(tokens), silence);
  } catch (const Error& e) {
    throw Error(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
}

}  // namespace pvq
