#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "gptdetox/embedding.hpp"
#include "test_helpers.hpp"

using namespace gptdetox;

TEST_CASE("cosine matches hand-computed values") {
  CHECK(cosine({{1, 2, 0}}, {{2, 1, 0}}) == doctest::Approx(0.8));
  CHECK(cosine({{1, 0}}, {{0, 1}}) == doctest::Approx(0.0));
  CHECK(cosine({{3, 4}}, {{3, 4}}) == doctest::Approx(1.0));
  CHECK(cosine({{1, 0}}, {{-1, 0}}) == doctest::Approx(-1.0));
}

TEST_CASE("cosine rejects degenerate inputs") {
  CHECK_THROWS(cosine({{1, 2}}, {{1, 2, 3}}));
  CHECK_THROWS(cosine({{0, 0}}, {{1, 2}}));
}

TEST_CASE("cosine is scale-invariant") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    Embedding a, b;
    for (int i = 0; i < 8; ++i) {
      a.values.push_back(val(gen));
      b.values.push_back(val(gen));
    }
    a.values[0] += 3.0;  // keep away from zero vectors
    b.values[0] += 3.0;
    Embedding scaled = b;
    for (auto& v : scaled.values) v *= 7.5;
    CHECK(cosine(a, b) == doctest::Approx(cosine(a, scaled)));
  }
}

TEST_CASE("hashed bag provider is deterministic and unit norm") {
  HashedBagProvider provider(64);
  auto a = provider.embed("you are stupid");
  auto b = provider.embed("you are stupid");
  CHECK(a == b);
  CHECK(a.dim() == 64);
  double norm = 0.0;
  for (double v : a.values) norm += v * v;
  CHECK(std::sqrt(norm) == doctest::Approx(1.0));
  CHECK(provider.id() == "hashed-bag-d64");
}

TEST_CASE("hashed bag provider ignores case and punctuation") {
  HashedBagProvider provider(32);
  CHECK(provider.embed("Shut UP!!") == provider.embed("shut up"));
  CHECK(cosine(provider.embed("alpha bravo"), provider.embed("alpha bravo charlie")) <
        1.0);
}

TEST_CASE("hashed bag provider rejects tiny dimensions and empty text") {
  CHECK_THROWS(HashedBagProvider(4));
  HashedBagProvider provider(16);
  CHECK_THROWS(provider.embed(""));
  CHECK_THROWS(provider.embed("!!!"));
}

TEST_CASE("build_index embeds the toxic side in corpus order") {
  std::mt19937_64 gen(21);
  auto corpus = testutil::random_corpus(gen, 8);
  HashedBagProvider provider(32);
  auto index = build_index(corpus, provider);
  REQUIRE(index.size() == 8);
  CHECK(index.provider_id == provider.id());
  CHECK(index.corpus_hash == corpus.content_hash());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(index.entries[i].first == corpus.pairs[i].id);
    CHECK(index.entries[i].second == provider.embed(corpus.pairs[i].toxic));
  }
}

TEST_CASE("top_k matches a brute-force oracle") {
  std::mt19937_64 gen(22);
  HashedBagProvider provider(32);
  for (int trial = 0; trial < 40; ++trial) {
    auto corpus = testutil::random_corpus(gen, 15);
    auto index = build_index(corpus, provider);
    auto query = provider.embed(testutil::random_sentence(gen));

    // Oracle: score every entry, stable sort by descending cosine.
    std::vector<std::pair<double, std::size_t>> scored;
    for (std::size_t i = 0; i < index.size(); ++i) {
      scored.emplace_back(cosine(query, index.entries[i].second), i);
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<std::string> expected;
    for (std::size_t i = 0; i < 5; ++i) {
      expected.push_back(index.entries[scored[i].second].first);
    }
    CHECK(top_k(query, index, 5) == expected);
  }
}

TEST_CASE("top_k tie-break favors the earlier entry") {
  EmbeddingIndex index;
  index.entries = {{"a", {{1, 0}}}, {"b", {{1, 0}}}, {"c", {{0, 1}}}};
  auto ids = top_k({{2, 0}}, index, 2);
  CHECK(ids == std::vector<std::string>{"a", "b"});
}

TEST_CASE("top_k handles short indexes and bad arguments") {
  EmbeddingIndex index;
  index.entries = {{"a", {{1, 0}}}};
  CHECK(top_k({{1, 0}}, index, 10) == std::vector<std::string>{"a"});
  CHECK_THROWS(top_k({{1, 0}}, index, 0));
  CHECK_THROWS(top_k({{1, 0}}, EmbeddingIndex{}, 1));
}

TEST_CASE("index save/load round-trips and validates the corpus hash") {
  std::mt19937_64 gen(23);
  auto corpus = testutil::random_corpus(gen, 6);
  HashedBagProvider provider(16);
  auto index = build_index(corpus, provider);

  testutil::TempDir dir("index");
  save_index(index, dir.file("index.jsonl"));
  auto loaded = load_index(dir.file("index.jsonl"), corpus.content_hash());
  CHECK(loaded.entries == index.entries);
  CHECK(loaded.provider_id == index.provider_id);
  CHECK_THROWS(load_index(dir.file("index.jsonl"), corpus.content_hash() + 1));
}

TEST_CASE("load_or_build_index reuses the cache file") {
  std::mt19937_64 gen(24);
  auto corpus = testutil::random_corpus(gen, 6);
  HashedBagProvider provider(16);
  testutil::TempDir dir("index-cache");

  auto first = load_or_build_index(corpus, provider, dir.path());
  std::size_t files = 0;
  for (auto& e : std::filesystem::directory_iterator(dir.path())) {
    (void)e;
    ++files;
  }
  CHECK(files == 1);
  auto second = load_or_build_index(corpus, provider, dir.path());
  CHECK(second.entries == first.entries);
}
