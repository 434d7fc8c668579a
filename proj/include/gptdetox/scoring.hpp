#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "gptdetox/embedding.hpp"
#include "gptdetox/lexicon.hpp"

namespace gptdetox {

struct ScoreTriple {
  double sta = 0.0;  // non-toxicity probability
  double sim = 0.0;  // content preservation
  double fl = 0.0;   // linguistic acceptability

  bool operator==(const ScoreTriple&) const = default;
};

double j_score(const ScoreTriple& t);  // sta * sim * fl
double s_score(const ScoreTriple& t);  // (sta + sim) / 2

class StaScorer {
 public:
  virtual ~StaScorer() = default;
  virtual double score(std::string_view output) = 0;
  virtual std::string id() const = 0;
};

class SimScorer {
 public:
  virtual ~SimScorer() = default;
  virtual double score(std::string_view input, std::string_view output) = 0;
  virtual std::string id() const = 0;
};

class FlScorer {
 public:
  virtual ~FlScorer() = default;
  virtual double score(std::string_view output) = 0;
  virtual std::string id() const = 0;
};

// 1.0 when the lexicon finds no toxic term, else 0.0.
class HeuristicStaScorer final : public StaScorer {
 public:
  explicit HeuristicStaScorer(ToxicLexicon lexicon);
  double score(std::string_view output) override;
  std::string id() const override { return "sta-lexicon-heuristic"; }

 private:
  ToxicLexicon lexicon_;
};

// Embedding cosine between input and output, clamped to [0, 1].
class EmbeddingSimScorer final : public SimScorer {
 public:
  explicit EmbeddingSimScorer(std::shared_ptr<EmbeddingProvider> provider);
  double score(std::string_view input, std::string_view output) override;
  std::string id() const override;

 private:
  std::shared_ptr<EmbeddingProvider> provider_;
};

// Weak offline stand-in: 1.0 iff the output has >= 2 tokens and starts with
// a letter.
class HeuristicFlScorer final : public FlScorer {
 public:
  double score(std::string_view output) override;
  std::string id() const override { return "fl-heuristic"; }
};

struct RemoteScorerConfig {
  std::string endpoint;
  std::string path;
  std::string api_key_env = "DETOX_API_KEY";
  int timeout_seconds = 30;
  int max_attempts = 5;
};

// Classifier endpoint returning {"probability": p} for {"text": ...} (or a
// text pair). Used for remote STA / FL backends.
class RemoteClassifierScorer final : public StaScorer, public FlScorer {
 public:
  explicit RemoteClassifierScorer(RemoteScorerConfig config);
  double score(std::string_view output) override;
  std::string id() const override;

 private:
  RemoteScorerConfig config_;
};

struct ScorerSet {
  std::shared_ptr<StaScorer> sta;
  std::shared_ptr<SimScorer> sim;
  std::shared_ptr<FlScorer> fl;

  ScoreTriple score(std::string_view input, std::string_view output) const;
};

ScorerSet make_heuristic_scorers(ToxicLexicon lexicon,
                                 std::shared_ptr<EmbeddingProvider> provider);

}  // namespace gptdetox
