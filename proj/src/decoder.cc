#include "pvq/decoder.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <unordered_map>

#include "pvq/error.h"

namespace pvq {
namespace {

void check_emissions(const EmissionMatrix& e, const TokenSet& tokens) {
  if (e.rows() > 0 && e.cols() != tokens.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "emission matrix has " + std::to_string(e.cols()) + " columns, token set has " +
                    std::to_string(tokens.size()));
  }
  for (double v : e.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "non-finite emission score");
  }
}

struct WordList {
  int word;
  std::shared_ptr<const WordList> prev;
};

std::vector<int> materialize(const std::shared_ptr<const WordList>& list) {
  std::vector<int> out;
  for (const WordList* p = list.get(); p; p = p->prev.get()) out.push_back(p->word);
  std::reverse(out.begin(), out.end());
  return out;
}

struct Hyp {
  std::vector<int> history;  // LM ids, at most order - 1
  int node = 0;
  int prev = -1;
  double score = 0.0;
  std::shared_ptr<const WordList> words;
  std::string key;
  std::size_t rank = 0;  // beam slot, 1-based
};

std::string state_key(const std::vector<int>& history, int node, int prev) {
  std::vector<int> ids(history);
  ids.push_back(node);
  ids.push_back(prev);
  std::string k(ids.size() * sizeof(int), '\0');
  std::memcpy(k.data(), ids.data(), k.size());
  return k;
}

// Strict order: higher score first, then smaller word sequence, then key.
bool better(const Hyp& a, const Hyp& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.words != b.words) {
    const auto wa = materialize(a.words);
    const auto wb = materialize(b.words);
    if (wa != wb) return wa < wb;
  }
  return a.key < b.key;
}

std::vector<int> push_history(const std::vector<int>& history, int word, int order) {
  std::vector<int> out(history);
  out.push_back(word);
  const std::size_t keep = static_cast<std::size_t>(std::max(order - 1, 0));
  if (out.size() > keep) out.erase(out.begin(), out.end() - static_cast<long>(keep));
  return out;
}

}  // namespace

std::string greedy_decode(const EmissionMatrix& e, const TokenSet& tokens) {
  check_emissions(e, tokens);
  std::string out;
  int prev = -1;
  bool pending_space = false;
  for (std::size_t t = 0; t < e.rows(); ++t) {
    const auto row = e.row(t);
    const int best = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    if (best == prev) continue;
    prev = best;
    if (best == tokens.silence()) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out += tokens.token(static_cast<std::size_t>(best));
  }
  return out;
}

void DecoderOptions::validate() const {
  if (beam_size < 1) throw Error(ErrorCode::kInvalidArgument, "beam_size must be >= 1");
  if (!(beam_threshold > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "beam_threshold must be > 0");
  }
  if (!std::isfinite(lm_weight) || !std::isfinite(word_score) || !std::isfinite(sil_weight)) {
    throw Error(ErrorCode::kInvalidArgument, "decoder weights must be finite");
  }
}

LexiconDecoder::LexiconDecoder(const TokenSet& tokens, const Lexicon& lexicon, const NGramLM& lm,
                               DecoderOptions options)
    : tokens_(tokens), lexicon_(lexicon), lm_(lm), options_(options) {
  options_.validate();
  if (lexicon.empty()) throw Error(ErrorCode::kInvalidArgument, "decoder: empty lexicon");
  if (lm.order() < 1 || lm.bos() == NGramLM::kNoWord || lm.eos() == NGramLM::kNoWord) {
    throw Error(ErrorCode::kInvalidArgument, "decoder: language model needs <s> and </s>");
  }
  for (const auto& w : lexicon.words()) {
    const int id = lm.index(w);
    if (id == NGramLM::kNoWord) {
      throw Error(ErrorCode::kInvalidArgument,
                  "decoder: word '" + w + "' is not in the language model, which has no <unk>");
    }
    lm_ids_.push_back(id);
  }
  trie_.emplace_back();
  for (const auto& s : lexicon.spellings()) {
    if (s.tokens.empty()) throw Error(ErrorCode::kInvalidArgument, "decoder: empty spelling");
    int node = 0;
    int prev = -1;
    for (int tok : s.tokens) {
      if (tok < 0 || static_cast<std::size_t>(tok) >= tokens.size() || tok == tokens.silence()) {
        throw Error(ErrorCode::kInvalidArgument, "decoder: lexicon does not match the token set");
      }
      if (tok == prev) continue;
      prev = tok;
      int next = child(node, tok);
      if (next < 0) {
        next = static_cast<int>(trie_.size());
        auto& kids = trie_[static_cast<std::size_t>(node)].children;
        kids.insert(std::lower_bound(kids.begin(), kids.end(), std::make_pair(tok, -1)),
                    {tok, next});
        trie_.emplace_back();
      }
      node = next;
    }
    auto& ws = trie_[static_cast<std::size_t>(node)].words;
    if (std::find(ws.begin(), ws.end(), s.word) == ws.end()) ws.push_back(s.word);
  }
  for (auto& n : trie_) std::sort(n.words.begin(), n.words.end());
}

int LexiconDecoder::child(int node, int token) const {
  const auto& kids = trie_[static_cast<std::size_t>(node)].children;
  const auto it = std::lower_bound(kids.begin(), kids.end(), std::make_pair(token, -1));
  return it != kids.end() && it->first == token ? it->second : -1;
}

DecodeResult LexiconDecoder::decode(const EmissionMatrix& e) const {
  check_emissions(e, tokens_);
  const int sil = tokens_.silence();
  const int order = lm_.order();
  const double lm_w = options_.lm_weight;

  std::vector<Hyp> beam(1);
  beam[0].history = push_history({}, lm_.bos(), order);
  beam[0].key = state_key(beam[0].history, 0, -1);
  beam[0].rank = 1;

  std::vector<Hyp> pool;
  auto pool_order = [](const Hyp& a, const Hyp& b) { return better(b, a); };
  auto push = [&](Hyp&& h) {
    h.key = state_key(h.history, h.node, h.prev);
    pool.push_back(std::move(h));
    std::push_heap(pool.begin(), pool.end(), pool_order);
  };

  std::vector<Hyp> next;
  std::unordered_map<std::string, std::size_t> where;
  for (std::size_t t = 0; t < e.rows(); ++t) {
    const auto row = e.row(t);
    auto expand = [&](const Hyp& h) {
      for (int c = 0; c < static_cast<int>(tokens_.size()); ++c) {
        const double gain = row[static_cast<std::size_t>(c)] + (c == sil ? options_.sil_weight : 0.0);
        if (c == h.prev) {
          Hyp n = h;
          n.score += gain;
          push(std::move(n));
        } else if (c == sil) {
          if (h.prev < 0) {
            Hyp n = h;
            n.prev = sil;
            n.score += gain;
            push(std::move(n));
            continue;
          }
          for (int w : trie_[static_cast<std::size_t>(h.node)].words) {
            const int lm_id = lm_ids_[static_cast<std::size_t>(w)];
            Hyp n;
            n.score = h.score + gain + lm_w * lm_.score(h.history, lm_id) + options_.word_score;
            n.history = push_history(h.history, lm_id, order);
            n.node = 0;
            n.prev = sil;
            n.words = std::make_shared<const WordList>(WordList{w, h.words});
            push(std::move(n));
          }
        } else {
          const int from = (h.prev < 0 || h.prev == sil) ? 0 : h.node;
          const int to = child(from, c);
          if (to < 0) continue;
          Hyp n = h;
          n.node = to;
          n.prev = c;
          n.score += gain;
          push(std::move(n));
        }
      }
    };

    // Slot p is filled with the best pending extension of the hypotheses
    // ranked <= p, so a narrower beam computes a prefix of a wider one.
    pool.clear();
    next.clear();
    where.clear();
    double top = -std::numeric_limits<double>::infinity();
    std::size_t expanded = 0;
    for (std::size_t p = 1; p <= options_.beam_size; ++p) {
      while (expanded < beam.size() && beam[expanded].rank <= p) expand(beam[expanded++]);
      bool filled = false;
      while (!pool.empty() && !filled) {
        std::pop_heap(pool.begin(), pool.end(), pool_order);
        Hyp h = std::move(pool.back());
        pool.pop_back();
        if (h.score < top - options_.beam_threshold) continue;
        const auto it = where.find(h.key);
        if (it != where.end() && !better(h, next[it->second])) continue;
        where[h.key] = next.size();
        top = std::max(top, h.score);
        h.rank = p;
        next.push_back(std::move(h));
        filled = true;
      }
      if (!filled) {
        if (expanded == beam.size()) break;
        p = beam[expanded].rank - 1;
      }
    }
    if (next.empty()) return {};
    beam.swap(next);
  }

  DecodeResult result;
  Hyp best_final;
  auto consider = [&](Hyp&& h) {
    h.key.clear();
    if (!result.found || better(h, best_final)) {
      best_final = std::move(h);
      result.found = true;
    }
  };
  for (const Hyp& h : beam) {
    if (h.prev < 0 || h.prev == sil) {
      Hyp n = h;
      n.score += lm_w * lm_.score(h.history, lm_.eos());
      consider(std::move(n));
      continue;
    }
    for (int w : trie_[static_cast<std::size_t>(h.node)].words) {
      const int lm_id = lm_ids_[static_cast<std::size_t>(w)];
      Hyp n;
      n.history = push_history(h.history, lm_id, order);
      n.score = h.score + lm_w * lm_.score(h.history, lm_id) + options_.word_score +
                lm_w * lm_.score(n.history, lm_.eos());
      n.words = std::make_shared<const WordList>(WordList{w, h.words});
      consider(std::move(n));
    }
  }
  if (!result.found) return result;
  result.score = best_final.score;
  result.word_ids = materialize(best_final.words);
  for (int w : result.word_ids) result.words.push_back(lexicon_.word(w));
  return result;
}

DecodeResult beam_decode(const EmissionMatrix& e, const TokenSet& tokens, const Lexicon& lexicon,
                         const NGramLM& lm, const DecoderOptions& options) {
  return LexiconDecoder(tokens, lexicon, lm, options).decode(e);
}

}  // namespace pvq
