#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracles.h"
#include "pvq/error.h"
#include "pvq/ngram_lm.h"

namespace {

pvq::NGramLM parse(const std::string& text) {
  std::istringstream in(text);
  return pvq::NGramLM::parse_arpa(in, "test.arpa");
}

const char* kHand = R"(
\data\
ngram 1=5
ngram 2=4
ngram 3=1

\1-grams:
-0.8	<s>	-0.5
-1.2	a	-0.3
-0.9	b	-0.25
-1.1	c
-0.7	</s>

\2-grams:
-0.4	<s> a	-0.2
-0.3	a b	-0.15
-0.6	b </s>
-0.5	b c

\3-grams:
-0.1	<s> a b

\end\
)";

const std::vector<std::string> kCorpus = {
    "el gato come pescado",
    "el perro come carne",
    "la casa es grande",
    "el gato es negro",
    "la niña come pan con el gato",
};

std::string line_of(const pvq::Error& e) {
  const std::string w = e.what();
  const auto a = w.find(':');
  const auto b = w.find(':', a + 1);
  return w.substr(a + 1, b - a - 1);
}

}  // namespace

TEST_CASE("unigram-only model with three words") {
  const auto lm = parse("\\data\\\nngram 1=3\n\n\\1-grams:\n-0.5\tx\n-0.6\ty\n-0.4\tz\n\n\\end\\\n");
  CHECK(lm.order() == 1);
  CHECK(lm.vocab_size() == 3);
  CHECK(lm.score(std::vector<int>{}, *lm.find("y")) == -0.6);
  CHECK(lm.score(std::vector<std::string>{"x", "z"}, "y") == -0.6);
  CHECK(lm.score(std::vector<std::string>{}, "w") == pvq::kUnknownLogProb);
  CHECK(!lm.unk().has_value());
}

TEST_CASE("hand-built model: stored entries and backoff queries") {
  const auto lm = parse(kHand);
  CHECK(lm.order() == 3);
  CHECK(lm.count(1) == 5);
  CHECK(lm.count(2) == 4);
  CHECK(lm.count(3) == 1);
  using H = std::vector<std::string>;
  CHECK(lm.score(H{}, "c") == -1.1);
  CHECK(lm.score(H{"<s>"}, "a") == -0.4);
  CHECK(lm.score(H{"<s>", "a"}, "b") == -0.1);
  // Unseen bigram: b(a) + P(c).
  CHECK(lm.score(H{"a"}, "c") == -0.3 + -1.1);
  // Unseen trigram, seen bigram: b(<s> a) + P(b | a).
  CHECK(lm.score(H{"<s>", "a"}, "c") == -0.2 + (-0.3 + -1.1));
  // History without a stored context contributes no backoff.
  CHECK(lm.score(H{"c", "b"}, "c") == -0.5);
  CHECK(lm.score(H{"c"}, "a") == -1.2);
  CHECK(lm.score(H{"b"}, "a") == -0.25 + -1.2);
  // Only the last order-1 words matter.
  CHECK(lm.score(H{"b", "b", "<s>", "a"}, "b") == -0.1);
  CHECK(lm.backoff(std::vector<int>{*lm.find("a")}) == -0.3);
  CHECK(lm.backoff(std::vector<int>{*lm.find("c")}) == 0.0);
  CHECK(lm_score(lm, {"a"}, "b") == -0.3);
}

TEST_CASE("every history of a corpus model sums to one") {
  for (int order : {2, 3}) {
    oracle::ArpaBuilder builder(kCorpus, order, 0.5);
    const auto lm = parse(builder.arpa());
    CHECK(lm.order() == order);
    std::vector<int> targets;
    for (const auto& w : builder.vocab()) targets.push_back(*lm.find(w));
    const auto histories = lm.histories();
    CHECK(histories.size() > 10);
    for (const auto& h : histories) {
      double total = 0.0;
      for (int w : targets) total += std::pow(10.0, lm.score(h, w));
      CHECK(std::abs(total - 1.0) <= 1e-3);
    }
  }
}

TEST_CASE("corpus model matches the builder's own probabilities") {
  oracle::ArpaBuilder builder(kCorpus, 3, 0.5);
  const auto lm = parse(builder.arpa());
  using H = std::vector<std::string>;
  for (const auto& [h, w] : {std::pair{H{"<s>", "el"}, "gato"}, std::pair{H{"come", "pan"}, "con"},
                             std::pair{H{"gato", "es"}, "grande"}, std::pair{H{"la"}, "perro"},
                             std::pair{H{"<s>"}, "</s>"}}) {
    CHECK(std::pow(10.0, lm.score(h, w)) == doctest::Approx(builder.prob(h, w)).epsilon(1e-9));
  }
}

TEST_CASE("unknown words map to <unk> when present") {
  const auto lm = parse("\\data\\\nngram 1=3\n\\1-grams:\n-1\t<unk>\n-0.5\t<s>\n-0.2\t</s>\n\\end\\\n");
  CHECK(lm.index("zebra") == *lm.unk());
  CHECK(lm.score(std::vector<std::string>{}, "zebra") == -1.0);
}

TEST_CASE("malformed files report line numbers") {
  auto fails_at = [](const std::string& text, const std::string& line) {
    try {
      parse(text);
      FAIL("expected a format error");
    } catch (const pvq::Error& e) {
      CHECK(e.code() == pvq::ErrorCode::kFormat);
      CHECK(line_of(e) == line);
    }
  };
  fails_at("hello\n", "1");
  fails_at("\\data\\\nngram 1=2\n\\1-grams:\n-1\ta\n\\end\\\n", "5");
  fails_at("\\data\\\nngram 1=1\n\\1-grams:\n0.5\ta\n\\end\\\n", "4");
  fails_at("\\data\\\nngram 1=1\n\\1-grams:\n-0.5\ta b\n\\end\\\n", "4");
  fails_at("\\data\\\nngram 1=1\nngram 2=1\n\\1-grams:\n-0.5\ta\n\\2-grams:\n-0.5\ta q\n\\end\\\n", "7");
  fails_at("\\data\\\nngram 1=x\n", "2");
  fails_at("\\data\\\nngram 2=1\n", "2");
  fails_at("\\data\\\nngram 1=1\n\\1-grams:\n-0.5\ta\n", "4");
  fails_at("\\data\\\nngram 1=1\n\\2-grams:\n", "3");
}

TEST_CASE("missing file is an io error") {
  try {
    pvq::load_arpa("/nonexistent/lm.arpa");
    FAIL("expected an error");
  } catch (const pvq::Error& e) {
    CHECK(e.code() == pvq::ErrorCode::kIo);
  }
}
