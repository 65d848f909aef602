#ifndef PVQ_NGRAM_LM_H_
#define PVQ_NGRAM_LM_H_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pvq {

/// Score returned for a word that is neither in the vocabulary nor covered
/// by an <unk> entry.
inline constexpr double kUnknownLogProb = -99.0;

/// Backoff n-gram model read from ARPA text. All scores are log10.
class NGramLM {
 public:
  static constexpr int kNoWord = -1;

  int order() const { return static_cast<int>(grams_.size()); }
  std::size_t vocab_size() const { return vocab_.size(); }
  const std::string& word(int id) const { return vocab_.at(static_cast<std::size_t>(id)); }
  std::optional<int> find(std::string_view word) const;
  /// Vocabulary id, the <unk> id for out-of-vocabulary words, or kNoWord.
  int index(std::string_view word) const;
  int bos() const { return bos_; }
  int eos() const { return eos_; }
  std::optional<int> unk() const;
  /// Number of n-grams of order n (1-based).
  std::size_t count(int n) const;

  /// log10 P(word | history) by the backoff recursion; only the last
  /// order - 1 history ids are used.
  double score(std::span<const int> history, int word) const;
  double score(const std::vector<std::string>& history, std::string_view word) const;

  bool contains(std::span<const int> ngram) const;
  /// Stored backoff weight of `ngram`, 0 when absent.
  double backoff(std::span<const int> ngram) const;
  /// Every stored n-gram below the top order, i.e. each history the model
  /// can condition on. The empty history is included.
  std::vector<std::vector<int>> histories() const;

  static NGramLM parse_arpa(std::istream& in, const std::string& name);

 private:
  struct Entry {
    double log_prob = 0.0;
    double backoff = 0.0;
  };

  static std::string key(std::span<const int> ids);
  const Entry* lookup(std::span<const int> ngram) const;

  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> vocab_index_;
  std::vector<std::unordered_map<std::string, Entry>> grams_;  // by order - 1
  std::vector<std::vector<std::vector<int>>> gram_list_;       // insertion order
  int bos_ = kNoWord;
  int eos_ = kNoWord;
  int unk_ = kNoWord;
};

NGramLM load_arpa(const std::filesystem::path& path);

/// Convenience form of NGramLM::score over words.
double lm_score(const NGramLM& lm, const std::vector<std::string>& history, std::string_view word);

}  // namespace pvq

#endif  // PVQ_NGRAM_LM_H_
