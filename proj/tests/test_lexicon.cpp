#include <doctest.h>

#include <algorithm>
#include <random>

#include "gptdetox/lexicon.hpp"
#include "test_helpers.hpp"

using namespace gptdetox;

namespace {

// Independent window-scan oracle: every matching (start, len) window via
// linear search over the term list, then the longest-then-leftmost overlap
// rule applied by repeated extraction.
std::vector<TermMatch> oracle_find(const std::vector<std::string>& tokens,
                                   const std::vector<std::vector<std::string>>& terms) {
  struct Window {
    std::size_t begin, end;
    std::string term;
  };
  std::vector<Window> windows;
  for (std::size_t start = 0; start < tokens.size(); ++start) {
    for (std::size_t end = start + 1; end <= tokens.size(); ++end) {
      for (const auto& term : terms) {
        if (end - start != term.size()) continue;
        bool equal = true;
        for (std::size_t i = 0; i < term.size(); ++i) {
          if (tokens[start + i] != term[i]) {
            equal = false;
            break;
          }
        }
        if (equal) {
          std::string joined;
          for (std::size_t i = 0; i < term.size(); ++i) {
            if (i) joined += ' ';
            joined += term[i];
          }
          windows.push_back(Window{start, end, joined});
        }
      }
    }
  }
  std::vector<TermMatch> picked;
  std::vector<bool> used(tokens.size(), false);
  while (true) {
    const Window* best = nullptr;
    for (const auto& w : windows) {
      bool free = true;
      for (std::size_t t = w.begin; t < w.end; ++t) free &= !used[t];
      if (!free) continue;
      if (best == nullptr || (w.end - w.begin) > (best->end - best->begin) ||
          ((w.end - w.begin) == (best->end - best->begin) && w.begin < best->begin)) {
        best = &w;
      }
    }
    if (best == nullptr) break;
    for (std::size_t t = best->begin; t < best->end; ++t) used[t] = true;
    picked.push_back(TermMatch{best->term, best->begin, best->end});
  }
  std::sort(picked.begin(), picked.end(),
            [](const TermMatch& a, const TermMatch& b) { return a.begin < b.begin; });
  return picked;
}

}  // namespace

TEST_CASE("normalize lowercases and splits on non-word characters") {
  CHECK(normalize("You're ridiculous!!") ==
        std::vector<std::string>{"you're", "ridiculous"});
  CHECK(normalize("") == std::vector<std::string>{});
  CHECK(normalize("DUMB as a Rock.") ==
        std::vector<std::string>{"dumb", "as", "a", "rock"});
  CHECK(normalize("a,b;;c") == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("tokenize records byte spans") {
  auto tokens = tokenize("Hi, you!");
  REQUIRE(tokens.size() == 2);
  CHECK(tokens[0].text == "hi");
  CHECK(tokens[0].begin == 0);
  CHECK(tokens[0].end == 2);
  CHECK(tokens[1].text == "you");
  CHECK(tokens[1].begin == 4);
  CHECK(tokens[1].end == 7);
}

TEST_CASE("lexicon load normalizes and deduplicates") {
  testutil::TempDir dir("lexicon");
  testutil::write_file(dir.file("terms.txt"), "fuck\nStupid\nstupid\n");
  auto lex = ToxicLexicon::from_file(dir.file("terms.txt"));
  CHECK(lex.size() == 2);
  CHECK(lex.contains({"fuck"}));
  CHECK(lex.contains({"stupid"}));
}

TEST_CASE("lexicon load handles empty files, comments and phrases") {
  testutil::TempDir dir("lexicon");
  testutil::write_file(dir.file("empty.txt"), "");
  CHECK(ToxicLexicon::from_file(dir.file("empty.txt")).empty());

  testutil::write_file(dir.file("phrase.txt"),
                       "# comment\n\ndumb as a rock\n");
  auto lex = ToxicLexicon::from_file(dir.file("phrase.txt"));
  CHECK(lex.size() == 1);
  CHECK(lex.max_phrase_tokens() == 4);
  CHECK(lex.contains({"dumb", "as", "a", "rock"}));
}

TEST_CASE("lexicon load fails on unreadable path") {
  CHECK_THROWS(ToxicLexicon::from_file("/nonexistent/terms.txt"));
}

TEST_CASE("find_toxic_terms matches whole tokens only") {
  auto lex = ToxicLexicon::from_terms({"ass"});
  CHECK(lex.find_toxic_terms("the whole class agreed").empty());
  auto matches = lex.find_toxic_terms("what an ass");
  REQUIRE(matches.size() == 1);
  CHECK(matches[0].term == "ass");
  CHECK(matches[0].begin == 2);
  CHECK(matches[0].end == 3);
}

TEST_CASE("find_toxic_terms on the zero-shot example sentence") {
  auto lex = ToxicLexicon::from_file(testutil::data_dir() / "lexicon" /
                                     "default_toxic.txt");
  auto matches = lex.find_toxic_terms(
      "this sick fuck is just a sociopath who doesn't want to face the "
      "consequences for his actions.");
  bool found = false;
  for (const auto& m : matches) found |= (m.term == "sick fuck" || m.term == "fuck");
  CHECK(found);
}

TEST_CASE("clean sentence yields no matches") {
  auto lex = ToxicLexicon::from_terms({"stupid", "fuck"});
  CHECK(lex.find_toxic_terms("have a wonderful day").empty());
}

TEST_CASE("longest match wins over a shorter prefix") {
  auto lex = ToxicLexicon::from_terms({"dumb as a rock", "dumb"});
  auto matches = lex.find_toxic_terms("Your as dumb as a rock.");
  REQUIRE(matches.size() == 1);
  CHECK(matches[0].term == "dumb as a rock");
}

TEST_CASE("find_toxic_terms equals the window-scan oracle on random inputs") {
  std::mt19937_64 gen(20240817);
  const auto& pool = testutil::word_pool();
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::uniform_int_distribution<int> term_count(1, 6);
  std::uniform_int_distribution<int> term_len(1, 3);

  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> raw_terms;
    int n_terms = term_count(gen);
    for (int t = 0; t < n_terms; ++t) {
      std::string term;
      int len = term_len(gen);
      for (int w = 0; w < len; ++w) {
        if (w) term += ' ';
        term += pool[pick(gen)];
      }
      raw_terms.push_back(term);
    }
    auto lex = ToxicLexicon::from_terms(raw_terms);
    std::string sentence = testutil::random_sentence(gen, 1, 12);
    auto tokens = normalize(sentence);
    CHECK(lex.find_toxic_terms(sentence) == oracle_find(tokens, lex.terms()));
  }
}

TEST_CASE("matching is case-insensitive") {
  auto lex = ToxicLexicon::from_terms({"stupid", "dumb as a rock"});
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::string sentence = testutil::random_sentence(gen) + " stupid dumb as a rock";
    std::string upper = sentence;
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    CHECK(lex.find_toxic_terms(sentence) == lex.find_toxic_terms(upper));
  }
}

TEST_CASE("match soundness: every span reproduces its term") {
  auto lex = ToxicLexicon::from_terms({"stupid", "dumb as a rock", "sick fuck"});
  std::string sentence = "you stupid, dumb as a rock, sick fuck person";
  auto tokens = normalize(sentence);
  for (const auto& m : lex.find_toxic_terms(sentence)) {
    std::string joined;
    for (std::size_t i = m.begin; i < m.end; ++i) {
      if (i > m.begin) joined += ' ';
      joined += tokens[i];
    }
    CHECK(joined == m.term);
    CHECK(lex.contains(normalize(m.term)));
  }
}
