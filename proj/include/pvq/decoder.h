#ifndef PVQ_DECODER_H_
#define PVQ_DECODER_H_

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "pvq/lexicon.h"
#include "pvq/matrix.h"
#include "pvq/ngram_lm.h"
#include "pvq/token_set.h"

namespace pvq {

/// T x |tokens| log-domain scores. Entries must be finite.
using EmissionMatrix = Matrix<double>;

/// Per-frame argmax (lowest index on ties), consecutive repeats collapsed,
/// silence runs turned into single spaces. Leading and trailing silence is
/// dropped.
std::string greedy_decode(const EmissionMatrix& e, const TokenSet& tokens);

struct DecoderOptions {
  double lm_weight = 2.5;
  double word_score = 1.0;
  std::size_t beam_size = 2500;
  double beam_threshold = 25.0;
  double sil_weight = -0.4;

  static constexpr std::size_t kUnboundedBeam = std::numeric_limits<std::size_t>::max();

  void validate() const;
};

struct DecodeResult {
  std::vector<std::string> words;
  std::vector<int> word_ids;  // lexicon ids
  double score = -std::numeric_limits<double>::infinity();
  bool found = false;  // false when no lexicon-legal path survives
};

/// Frame-synchronous lexicon-constrained beam search with an n-gram LM.
///
/// A path assigns one token per frame. Consecutive equal tokens merge into one
/// segment; letter segments between silences must spell a lexicon word, so
/// spellings are matched with doubled letters merged. Words are scored when
/// the following silence begins or at the final frame, and </s> is scored at
/// the end. Total score:
///   sum of emissions + lm_weight * log10 P(words, </s>)
///   + word_score * #words + sil_weight * #silence frames.
/// Lexicon words missing from the LM are scored as <unk>.
///
/// Each frame fills beam slots 1..beam_size in order. Slot p takes the best
/// pending extension of the hypotheses in slots <= p of the previous frame,
/// skipping extensions more than beam_threshold below the best one kept so
/// far and extensions whose state (LM context, lexicon prefix, last token) is
/// already held with a better score. A narrower beam therefore computes a
/// prefix of a wider one, and the returned score never decreases as
/// beam_size grows. Ties are broken by the word-id sequence, then by the
/// state itself.
class LexiconDecoder {
 public:
  LexiconDecoder(const TokenSet& tokens, const Lexicon& lexicon, const NGramLM& lm,
                 DecoderOptions options);

  DecodeResult decode(const EmissionMatrix& e) const;

  const DecoderOptions& options() const { return options_; }

 private:
  struct TrieNode {
    std::vector<std::pair<int, int>> children;  // token -> node, sorted by token
    std::vector<int> words;                     // lexicon ids ending here
  };

  int child(int node, int token) const;

  const TokenSet& tokens_;
  const Lexicon& lexicon_;
  const NGramLM& lm_;
  DecoderOptions options_;
  std::vector<TrieNode> trie_;
  std::vector<int> lm_ids_;  // lexicon id -> LM id
};

DecodeResult beam_decode(const EmissionMatrix& e, const TokenSet& tokens, const Lexicon& lexicon,
                         const NGramLM& lm, const DecoderOptions& options);

}  // namespace pvq

#endif  // PVQ_DECODER_H_
