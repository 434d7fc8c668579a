#include "gptdetox/selection.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "gptdetox/util.hpp"

namespace gptdetox {

namespace {

bool eligible(const SentencePair& pair, std::string_view exclude_toxic) {
  if (pair.toxic == exclude_toxic) return false;
  for (char c : pair.neutral) {
    if (!std::isspace(static_cast<unsigned char>(c))) return true;
  }
  return false;
}

// Seeded partial Fisher-Yates; std::shuffle/std::sample are
// implementation-defined, and draws must replay identically everywhere.
std::vector<std::size_t> draw_without_replacement(std::vector<std::size_t> pool,
                                                  std::size_t count,
                                                  std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  count = std::min(count, pool.size());
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + static_cast<std::size_t>(gen() % (pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

bool contains_window(const std::vector<std::string>& tokens,
                     const std::vector<std::string>& term) {
  if (term.empty() || term.size() > tokens.size()) return false;
  for (std::size_t i = 0; i + term.size() <= tokens.size(); ++i) {
    if (std::equal(term.begin(), term.end(), tokens.begin() + i)) return true;
  }
  return false;
}

}  // namespace

std::string strategy_kind_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kZeroShot: return "zero";
    case StrategyKind::kRandom: return "random";
    case StrategyKind::kWmes: return "wmes";
    case StrategyKind::kCmes: return "cmes";
  }
  throw std::runtime_error("invalid strategy kind");
}

StrategyKind strategy_kind_from_name(std::string_view name) {
  if (name == "zero" || name == "zero-shot") return StrategyKind::kZeroShot;
  if (name == "random") return StrategyKind::kRandom;
  if (name == "wmes") return StrategyKind::kWmes;
  if (name == "cmes") return StrategyKind::kCmes;
  throw std::runtime_error("unknown strategy: " + std::string(name));
}

std::string SelectionStrategy::setting_id() const {
  if (kind == StrategyKind::kZeroShot) return "zero";
  return strategy_kind_name(kind) + "-k" + std::to_string(k);
}

ExampleSet select_random(const Corpus& corpus, int k, std::uint64_t seed,
                         std::string_view exclude_toxic) {
  if (k < 1) {
    throw std::runtime_error("select_random: k must be >= 1");
  }
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (eligible(corpus.pairs[i], exclude_toxic)) pool.push_back(i);
  }
  if (pool.empty()) {
    throw std::runtime_error("select_random: no eligible pairs in corpus");
  }
  auto chosen = draw_without_replacement(std::move(pool),
                                         static_cast<std::size_t>(k), seed);
  ExampleSet set;
  set.strategy = SelectionStrategy{StrategyKind::kRandom, k, seed};
  for (std::size_t idx : chosen) {
    set.examples.push_back(SelectedExample{corpus.pairs[idx], {}, 0.0, false});
  }
  set.shortfall = k - static_cast<int>(set.examples.size());
  return set;
}

ExampleSet select_wmes(const Corpus& corpus, const ToxicLexicon& lexicon,
                       std::string_view s_toxic, int k) {
  if (k < 1) {
    throw std::runtime_error("select_wmes: k must be >= 1");
  }
  auto query_matches = lexicon.find_toxic_terms(s_toxic);
  std::vector<std::vector<std::string>> query_terms;
  for (const auto& m : query_matches) {
    query_terms.push_back(normalize(m.term));
  }

  ExampleSet set;
  set.strategy = SelectionStrategy{StrategyKind::kWmes, k, 0};
  std::unordered_set<std::string> chosen_ids;
  for (const auto& pair : corpus.pairs) {
    if (static_cast<int>(set.examples.size()) >= k) break;
    if (!eligible(pair, s_toxic)) continue;
    if (query_terms.empty()) break;
    auto tokens = normalize(pair.toxic);
    std::vector<std::string> shared;
    for (std::size_t t = 0; t < query_terms.size(); ++t) {
      if (contains_window(tokens, query_terms[t])) {
        shared.push_back(query_matches[t].term);
      }
    }
    if (shared.empty()) continue;
    chosen_ids.insert(pair.id);
    set.examples.push_back(SelectedExample{pair, std::move(shared), 0.0, false});
  }
  set.shortfall = k - static_cast<int>(set.examples.size());

  if (set.shortfall > 0) {
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto& pair = corpus.pairs[i];
      if (!eligible(pair, s_toxic) || chosen_ids.count(pair.id)) continue;
      pool.push_back(i);
    }
    auto backfill = draw_without_replacement(
        std::move(pool), static_cast<std::size_t>(set.shortfall),
        fnv1a64(s_toxic));
    for (std::size_t idx : backfill) {
      set.examples.push_back(
          SelectedExample{corpus.pairs[idx], {}, 0.0, true});
    }
  }
  return set;
}

ExampleSet select_cmes(const Corpus& corpus, const EmbeddingIndex& index,
                       std::string_view s_toxic, int k,
                       EmbeddingProvider& provider) {
  if (k < 1) {
    throw std::runtime_error("select_cmes: k must be >= 1");
  }
  if (index.empty()) {
    throw std::runtime_error("select_cmes: empty embedding index");
  }
  Embedding query = provider.embed(s_toxic);

  std::unordered_map<std::string, const SentencePair*> by_id;
  for (const auto& pair : corpus.pairs) by_id.emplace(pair.id, &pair);
  std::unordered_map<std::string, const Embedding*> emb_by_id;
  for (const auto& [id, emb] : index.entries) emb_by_id.emplace(id, &emb);

  // Rank the whole index, then drop the query itself and ineligible pairs.
  auto ranked = top_k(query, index, index.size());

  ExampleSet set;
  set.strategy = SelectionStrategy{StrategyKind::kCmes, k, 0};
  for (const auto& id : ranked) {
    if (static_cast<int>(set.examples.size()) >= k) break;
    auto it = by_id.find(id);
    if (it == by_id.end() || !eligible(*it->second, s_toxic)) continue;
    set.examples.push_back(SelectedExample{
        *it->second, {}, cosine(query, *emb_by_id.at(id)), false});
  }
  set.shortfall = k - static_cast<int>(set.examples.size());
  return set;
}

}  // namespace gptdetox
