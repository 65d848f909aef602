#ifndef PVQ_WER_H_
#define PVQ_WER_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pvq {

enum class EditOp { kMatch, kSubstitution, kInsertion, kDeletion };

struct AlignedPair {
  EditOp op = EditOp::kMatch;
  long ref_index = -1;  // -1 for insertions
  long hyp_index = -1;  // -1 for deletions
};

struct WerReport {
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  std::size_t reference_words = 0;
  std::vector<AlignedPair> alignment;

  std::size_t errors() const { return substitutions + insertions + deletions; }
  /// Percentage. Throws kUndefined when the reference is empty but the
  /// hypothesis is not; both empty gives 0.
  double wer_pct() const;

  WerReport& operator+=(const WerReport& other);
};

/// Minimal unit-cost alignment. On the backtrace, match or substitution is
/// preferred over deletion, and deletion over insertion.
WerReport wer(const std::vector<std::string>& reference, const std::vector<std::string>& hypothesis);

/// Same alignment over Unicode code points of the space-joined words.
WerReport cer(const std::vector<std::string>& reference, const std::vector<std::string>& hypothesis);

/// Lowercases (ASCII and Latin-1 letters in UTF-8) and removes punctuation
/// other than apostrophes, including inverted Spanish marks and guillemets.
std::string normalize_text(std::string_view text);

std::vector<std::string> split_words(std::string_view text);

struct Transcript {
  std::string id;
  std::string text;
};

/// id<TAB>text per line; ids must be unique.
std::vector<Transcript> read_transcripts(const std::filesystem::path& path);

}  // namespace pvq

#endif  // PVQ_WER_H_
