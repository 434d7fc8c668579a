#include "gptdetox/ensemble.hpp"

#include <future>
#include <iostream>
#include <optional>
#include <semaphore>
#include <stdexcept>

#include "gptdetox/util.hpp"

namespace gptdetox {

ScoringFunction scoring_function_from_name(std::string_view name) {
  if (name == "s" || name == "s-score") return ScoringFunction::kSScore;
  if (name == "j" || name == "j-score") return ScoringFunction::kJScore;
  throw std::runtime_error("unknown scoring function: " + std::string(name));
}

std::string scoring_function_name(ScoringFunction fn) {
  return fn == ScoringFunction::kSScore ? "s-score" : "j-score";
}

double apply_scoring_function(ScoringFunction fn, const ScoreTriple& t) {
  return fn == ScoringFunction::kSScore ? s_score(t) : j_score(t);
}

std::size_t eicl_select(const std::vector<Candidate>& candidates,
                        ScoringFunction fn) {
  if (candidates.empty()) {
    throw std::runtime_error("eicl_select: no candidates");
  }
  std::size_t best = 0;
  double best_score = apply_scoring_function(fn, candidates[0].scores);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    double score = apply_scoring_function(fn, candidates[i].scores);
    if (score > best_score) {
      best = i;
      best_score = score;
    }
  }
  return best;
}

EiclPipeline::EiclPipeline(Corpus train_corpus, ToxicLexicon lexicon,
                           EmbeddingIndex index,
                           std::shared_ptr<EmbeddingProvider> provider,
                           std::shared_ptr<GenerationBackend> backend,
                           ScorerSet scorers, EnsembleConfig config)
    : train_(std::move(train_corpus)),
      lexicon_(std::move(lexicon)),
      index_(std::move(index)),
      provider_(std::move(provider)),
      backend_(std::move(backend)),
      scorers_(std::move(scorers)),
      config_(std::move(config)) {}

ExampleSet EiclPipeline::select_examples(std::string_view input,
                                         const SelectionStrategy& setting) const {
  switch (setting.kind) {
    case StrategyKind::kZeroShot:
      return ExampleSet{{}, setting, 0};
    case StrategyKind::kRandom: {
      std::uint64_t seed = mix_seed(mix_seed(config_.grid.seed,
                                             fnv1a64(setting.setting_id())),
                                    fnv1a64(input));
      return select_random(train_, setting.k, seed, input);
    }
    case StrategyKind::kWmes:
      return select_wmes(train_, lexicon_, input, setting.k);
    case StrategyKind::kCmes:
      return select_cmes(train_, index_, input, setting.k, *provider_);
  }
  throw std::runtime_error("invalid strategy kind");
}

std::string EiclPipeline::render_prompt(std::string_view input,
                                        const SelectionStrategy& setting) const {
  if (setting.kind == StrategyKind::kZeroShot) {
    return render_zero_shot(input);
  }
  return render_few_shot(select_examples(input, setting), input);
}

Candidate EiclPipeline::run_setting(std::string_view input,
                                    const SelectionStrategy& setting) const {
  GenerationRequest request{render_prompt(input, setting), config_.model,
                            config_.temperature, config_.max_tokens};
  GenerationResult generated = backend_->generate(request);

  Candidate candidate;
  candidate.setting_id = setting.setting_id();
  candidate.output = generated.text;
  candidate.flags = generated.flags;
  if (generated.text.empty()) {
    candidate.scores = ScoreTriple{0.0, 0.0, 0.0};
  } else {
    candidate.scores = scorers_.score(input, generated.text);
  }
  candidate.ensemble_score =
      apply_scoring_function(config_.scoring_fn, candidate.scores);
  return candidate;
}

EiclResult EiclPipeline::run(std::string_view input) const {
  auto settings = enumerate_prompt_settings(config_.grid);
  std::vector<std::optional<Candidate>> slots(settings.size());
  std::vector<std::string> errors(settings.size());

  int workers = std::max(1, config_.concurrency);
  std::counting_semaphore<> gate(workers);
  std::vector<std::future<void>> futures;
  futures.reserve(settings.size());
  for (std::size_t i = 0; i < settings.size(); ++i) {
    futures.push_back(std::async(std::launch::async, [&, i]() {
      gate.acquire();
      try {
        slots[i] = run_setting(input, settings[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
      gate.release();
    }));
  }
  for (auto& f : futures) f.get();

  EiclResult result;
  for (std::size_t i = 0; i < settings.size(); ++i) {
    if (slots[i]) {
      result.candidates.push_back(std::move(*slots[i]));
    } else {
      ++result.failed_settings;
      std::cerr << "warning: setting " << settings[i].setting_id()
                << " failed: " << errors[i] << '\n';
    }
  }
  if (result.candidates.empty()) {
    throw std::runtime_error("all prompt settings failed for input: " +
                             std::string(input));
  }
  result.best_index = eicl_select(result.candidates, config_.scoring_fn);
  return result;
}

}  // namespace gptdetox
