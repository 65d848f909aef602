#ifndef PVQ_LEXICON_H_
#define PVQ_LEXICON_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pvq/token_set.h"

namespace pvq {

/// Words with one or more spellings over a TokenSet. Word ids follow first
/// appearance.
class Lexicon {
 public:
  struct Spelling {
    int word = 0;
    std::vector<int> tokens;
  };

  /// Spellings must be nonempty and must not contain the silence token.
  void add(std::string_view word, std::vector<int> tokens, const TokenSet& token_set);

  std::size_t num_words() const { return words_.size(); }
  const std::string& word(int id) const { return words_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& words() const { return words_; }
  std::optional<int> find(std::string_view word) const;
  const std::vector<Spelling>& spellings() const { return spellings_; }
  bool empty() const { return spellings_.empty(); }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
  std::vector<Spelling> spellings_;
};

/// word<TAB>space-separated tokens, one spelling per line.
Lexicon load_lexicon(const std::filesystem::path& path, const TokenSet& tokens);

}  // namespace pvq

#endif  // PVQ_LEXICON_H_
