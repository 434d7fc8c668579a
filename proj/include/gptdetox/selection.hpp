#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gptdetox/corpus.hpp"
#include "gptdetox/embedding.hpp"
#include "gptdetox/lexicon.hpp"

namespace gptdetox {

enum class StrategyKind { kZeroShot, kRandom, kWmes, kCmes };

std::string strategy_kind_name(StrategyKind kind);
StrategyKind strategy_kind_from_name(std::string_view name);

struct SelectionStrategy {
  StrategyKind kind = StrategyKind::kZeroShot;
  int k = 0;              // few-shot kinds only
  std::uint64_t seed = 0;  // random kind only

  // "zero", "random-k3", "wmes-k10", ...
  std::string setting_id() const;
  bool operator==(const SelectionStrategy&) const = default;
};

struct SelectedExample {
  SentencePair pair;
  std::vector<std::string> match_terms;  // WMES: lexicon terms shared with the query
  double similarity = 0.0;               // CMES: cosine to the query
  bool backfilled = false;
};

struct ExampleSet {
  std::vector<SelectedExample> examples;
  SelectionStrategy strategy;
  int shortfall = 0;  // how many short of k the pool left us
};

// k distinct eligible pairs (non-empty neutral side, query excluded), drawn
// uniformly without replacement with a seeded generator; order = draw order.
ExampleSet select_random(const Corpus& corpus, int k, std::uint64_t seed,
                         std::string_view exclude_toxic = {});

// Algorithm: match the query's toxic terms against training toxic sides;
// candidates keep corpus order, first k win. Short pools backfill from
// seeded random over the rest of the corpus.
ExampleSet select_wmes(const Corpus& corpus, const ToxicLexicon& lexicon,
                       std::string_view s_toxic, int k);

// Nearest neighbors by embedding cosine, self excluded, descending
// similarity order.
ExampleSet select_cmes(const Corpus& corpus, const EmbeddingIndex& index,
                       std::string_view s_toxic, int k,
                       EmbeddingProvider& provider);

}  // namespace gptdetox
