#include <doctest.h>

#include <algorithm>
#include <random>

#include "gptdetox/ensemble.hpp"
#include "test_helpers.hpp"

using namespace gptdetox;

namespace {

Candidate make_candidate(const std::string& id, double sta, double sim, double fl) {
  Candidate c;
  c.setting_id = id;
  c.output = "output for " + id;
  c.scores = ScoreTriple{sta, sim, fl};
  return c;
}

Corpus train_corpus() {
  Corpus corpus;
  corpus.pairs = {
      {"0", "you are stupid", "you are wrong", ""},
      {"1", "what a stupid retort", "what a poor retort", ""},
      {"2", "shut up already", "please be quiet", ""},
      {"3", "this is stupid and useless", "this is not helpful", ""},
      {"4", "stop being so stupid about it", "stop being so difficult", ""},
  };
  return corpus;
}

EiclPipeline make_pipeline(EnsembleConfig config,
                           std::shared_ptr<MockBackend>* backend_out = nullptr) {
  auto corpus = train_corpus();
  auto lexicon = ToxicLexicon::from_terms({"stupid", "shut up"});
  auto provider = std::make_shared<HashedBagProvider>(64);
  auto index = build_index(corpus, *provider);
  auto backend = std::make_shared<MockBackend>(lexicon);
  if (backend_out) *backend_out = backend;
  auto scorers = make_heuristic_scorers(lexicon, provider);
  return EiclPipeline(corpus, lexicon, index, provider, backend, scorers,
                      std::move(config));
}

}  // namespace

TEST_CASE("scoring function names parse both spellings") {
  CHECK(scoring_function_from_name("s") == ScoringFunction::kSScore);
  CHECK(scoring_function_from_name("s-score") == ScoringFunction::kSScore);
  CHECK(scoring_function_from_name("j") == ScoringFunction::kJScore);
  CHECK(scoring_function_from_name("j-score") == ScoringFunction::kJScore);
  CHECK_THROWS(scoring_function_from_name("bleu"));
  CHECK(scoring_function_name(ScoringFunction::kJScore) == "j-score");
}

TEST_CASE("selection picks the published per-setting winner") {
  // Per-candidate ensemble scores 0.75 / 0.48 / 0.98 / 0.85: the word-match
  // strategy should win under the mean-of-sta-and-sim function.
  std::vector<Candidate> candidates = {
      make_candidate("zero", 0.70, 0.80, 1.0),
      make_candidate("random-k5", 0.40, 0.56, 1.0),
      make_candidate("wmes-k5", 0.98, 0.98, 1.0),
      make_candidate("cmes-k5", 0.90, 0.80, 1.0),
  };
  CHECK(s_score(candidates[0].scores) == doctest::Approx(0.75));
  CHECK(s_score(candidates[1].scores) == doctest::Approx(0.48));
  CHECK(s_score(candidates[2].scores) == doctest::Approx(0.98));
  CHECK(s_score(candidates[3].scores) == doctest::Approx(0.85));
  CHECK(eicl_select(candidates, ScoringFunction::kSScore) == 2);
  CHECK(candidates[eicl_select(candidates, ScoringFunction::kSScore)].setting_id ==
        "wmes-k5");
}

TEST_CASE("selection tie-break keeps the earliest candidate") {
  std::vector<Candidate> candidates = {
      make_candidate("zero", 0.9, 0.9, 0.9),
      make_candidate("wmes-k1", 0.9, 0.9, 0.9),
  };
  CHECK(eicl_select(candidates, ScoringFunction::kJScore) == 0);
  CHECK(eicl_select({candidates[0]}, ScoringFunction::kJScore) == 0);
  CHECK_THROWS(eicl_select({}, ScoringFunction::kJScore));
}

TEST_CASE("selection is a true argmax") {
  std::mt19937_64 gen(53);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Candidate> candidates;
    for (int i = 0; i < 10; ++i) {
      candidates.push_back(make_candidate("c" + std::to_string(i), unit(gen),
                                          unit(gen), unit(gen)));
    }
    for (auto fn : {ScoringFunction::kSScore, ScoringFunction::kJScore}) {
      std::size_t best = eicl_select(candidates, fn);
      double best_score = apply_scoring_function(fn, candidates[best].scores);
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        double score = apply_scoring_function(fn, candidates[i].scores);
        CHECK(score <= best_score);
        if (i < best) CHECK(score < best_score);
      }
    }
  }
}

TEST_CASE("pipeline renders every grid setting for an input") {
  EnsembleConfig config;
  config.grid.ks = {1, 3};
  auto pipeline = make_pipeline(config);
  auto settings = enumerate_prompt_settings(config.grid);
  REQUIRE(settings.size() == 7);

  std::string input = "do not be so stupid about this";
  for (const auto& setting : settings) {
    auto prompt = pipeline.render_prompt(input, setting);
    CHECK(prompt.find(input) != std::string::npos);
    if (setting.kind == StrategyKind::kZeroShot) {
      CHECK(prompt.rfind("Rephrase", 0) == 0);
    } else {
      CHECK(prompt.rfind("Paraphrase", 0) == 0);
    }
  }
}

TEST_CASE("random example draws are deterministic per (setting, input)") {
  EnsembleConfig config;
  auto pipeline = make_pipeline(config);
  SelectionStrategy setting{StrategyKind::kRandom, 2, 0};
  auto a = pipeline.select_examples("you stupid fool", setting);
  auto b = pipeline.select_examples("you stupid fool", setting);
  REQUIRE(a.examples.size() == b.examples.size());
  for (std::size_t i = 0; i < a.examples.size(); ++i) {
    CHECK(a.examples[i].pair == b.examples[i].pair);
  }

  auto other = pipeline.select_examples("shut up right now", setting);
  REQUIRE(other.examples.size() == a.examples.size());
  bool identical = true;
  for (std::size_t i = 0; i < a.examples.size(); ++i) {
    identical &= other.examples[i].pair == a.examples[i].pair;
  }
  CHECK(!identical);  // the draw seed folds in the input text
}

TEST_CASE("run produces one candidate per setting and a detoxified winner") {
  EnsembleConfig config;
  config.grid.ks = {1, 3};
  config.concurrency = 3;
  std::shared_ptr<MockBackend> backend;
  auto pipeline = make_pipeline(config, &backend);

  auto result = pipeline.run("you are so stupid my friend");
  CHECK(result.failed_settings == 0);
  REQUIRE(result.candidates.size() == 7);
  CHECK(backend->call_count() == 7);
  CHECK(result.candidates[0].setting_id == "zero");

  const auto& best = result.candidates[result.best_index];
  CHECK(best.output == "you are so my friend");
  CHECK(best.scores.sta == 1.0);
  for (const auto& c : result.candidates) {
    CHECK(c.ensemble_score <= best.ensemble_score);
    CHECK(c.output.find("stupid") == std::string::npos);
  }
}

TEST_CASE("run tolerates partial setting failures") {
  // k larger than the eligible pool is fine for random (shortfall), so force
  // failures through a backend that rejects certain prompts instead.
  class PickyBackend final : public GenerationBackend {
   public:
    GenerationResult generate(const GenerationRequest& request) override {
      if (request.prompt.rfind("Paraphrase", 0) == 0) {
        throw std::runtime_error("few-shot rejected");
      }
      return postprocess_reply("a calm reply");
    }
    std::string name() const override { return "picky"; }
  };

  auto corpus = train_corpus();
  auto lexicon = ToxicLexicon::from_terms({"stupid"});
  auto provider = std::make_shared<HashedBagProvider>(64);
  auto index = build_index(corpus, *provider);
  auto scorers = make_heuristic_scorers(lexicon, provider);
  EnsembleConfig config;
  config.grid.ks = {1};
  EiclPipeline pipeline(corpus, lexicon, index, provider,
                        std::make_shared<PickyBackend>(), scorers, config);

  auto result = pipeline.run("you are stupid");
  CHECK(result.failed_settings == 3);
  REQUIRE(result.candidates.size() == 1);
  CHECK(result.candidates[0].setting_id == "zero");
}

TEST_CASE("run throws when every setting fails") {
  class DeadBackend final : public GenerationBackend {
   public:
    GenerationResult generate(const GenerationRequest&) override {
      throw std::runtime_error("down");
    }
    std::string name() const override { return "dead"; }
  };

  auto corpus = train_corpus();
  auto lexicon = ToxicLexicon::from_terms({"stupid"});
  auto provider = std::make_shared<HashedBagProvider>(64);
  auto index = build_index(corpus, *provider);
  auto scorers = make_heuristic_scorers(lexicon, provider);
  EnsembleConfig config;
  config.grid.ks = {1};
  EiclPipeline pipeline(corpus, lexicon, index, provider,
                        std::make_shared<DeadBackend>(), scorers, config);
  CHECK_THROWS(pipeline.run("you are stupid"));
}

TEST_CASE("winner is invariant under order-preserving transforms of the scores") {
  std::mt19937_64 gen(59);
  std::uniform_real_distribution<double> unit(0.1, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Candidate> candidates;
    for (int i = 0; i < 6; ++i) {
      candidates.push_back(make_candidate("c" + std::to_string(i), unit(gen),
                                          unit(gen), unit(gen)));
    }
    std::size_t best_j = eicl_select(candidates, ScoringFunction::kJScore);
    // sqrt of each component preserves the j-score ordering.
    auto transformed = candidates;
    for (auto& c : transformed) {
      c.scores.sta = std::sqrt(c.scores.sta);
      c.scores.sim = std::sqrt(c.scores.sim);
      c.scores.fl = std::sqrt(c.scores.fl);
    }
    CHECK(eicl_select(transformed, ScoringFunction::kJScore) == best_j);
  }
}
