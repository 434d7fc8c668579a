#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "gptdetox/corpus.hpp"
#include "gptdetox/embedding.hpp"
#include "gptdetox/generation.hpp"
#include "gptdetox/lexicon.hpp"
#include "gptdetox/prompting.hpp"
#include "gptdetox/scoring.hpp"

namespace gptdetox {

enum class ScoringFunction { kSScore, kJScore };

ScoringFunction scoring_function_from_name(std::string_view name);
std::string scoring_function_name(ScoringFunction fn);
double apply_scoring_function(ScoringFunction fn, const ScoreTriple& t);

struct Candidate {
  std::string setting_id;
  std::string output;
  ScoreTriple scores;
  double ensemble_score = 0.0;
  GenerationFlags flags;
};

// Index of the argmax under fn; ties break to the earliest position.
std::size_t eicl_select(const std::vector<Candidate>& candidates,
                        ScoringFunction fn);

struct EnsembleConfig {
  PromptGridConfig grid;
  ScoringFunction scoring_fn = ScoringFunction::kJScore;
  std::string model = "gpt-3.5-turbo";
  double temperature = 0.0;
  int max_tokens = 256;
  int concurrency = 4;
};

struct EiclResult {
  std::size_t best_index = 0;
  std::vector<Candidate> candidates;  // enumeration order, failures dropped
  int failed_settings = 0;
};

/// Pipeline handles for per-input EICL: generate one candidate per base
/// prompt setting, score each reference-free, keep the argmax.
class EiclPipeline {
 public:
  EiclPipeline(Corpus train_corpus, ToxicLexicon lexicon,
               EmbeddingIndex index,
               std::shared_ptr<EmbeddingProvider> provider,
               std::shared_ptr<GenerationBackend> backend, ScorerSet scorers,
               EnsembleConfig config);

  EiclResult run(std::string_view input) const;

  // One candidate for a single explicit setting (used by `run` over grids).
  Candidate run_setting(std::string_view input,
                        const SelectionStrategy& setting) const;

  ExampleSet select_examples(std::string_view input,
                             const SelectionStrategy& setting) const;
  std::string render_prompt(std::string_view input,
                            const SelectionStrategy& setting) const;

  const EnsembleConfig& config() const { return config_; }
  const Corpus& train_corpus() const { return train_; }
  const ToxicLexicon& lexicon() const { return lexicon_; }

 private:
  Corpus train_;
  ToxicLexicon lexicon_;
  EmbeddingIndex index_;
  std::shared_ptr<EmbeddingProvider> provider_;
  std::shared_ptr<GenerationBackend> backend_;
  ScorerSet scorers_;
  EnsembleConfig config_;
};

}  // namespace gptdetox
