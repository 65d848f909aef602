#ifndef PVQ_TOKEN_SET_H_
#define PVQ_TOKEN_SET_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pvq {

inline constexpr std::string_view kDefaultSilenceToken = "|";

/// Ordered grapheme tokens; column i of an emission matrix scores token i.
class TokenSet {
 public:
  TokenSet(std::vector<std::string> tokens, std::string_view silence = kDefaultSilenceToken);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(std::size_t index) const { return tokens_.at(index); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::optional<int> find(std::string_view token) const;
  int silence() const { return silence_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
  int silence_ = 0;
};

/// One token per line; blank lines are skipped.
TokenSet load_tokens(const std::filesystem::path& path,
                     std::string_view silence = kDefaultSilenceToken);

}  // namespace pvq

#endif  // PVQ_TOKEN_SET_H_
