#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "gptdetox/corpus.hpp"

namespace gptdetox {

struct Embedding {
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
  bool operator==(const Embedding&) const = default;
};

// Exact cosine similarity; throws on dimension mismatch or zero vectors.
double cosine(const Embedding& a, const Embedding& b);

/// Sentence encoder contract. Implementations must be deterministic for a
/// fixed (provider, text).
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual Embedding embed(std::string_view text) = 0;
  virtual std::size_t dim() const = 0;
  virtual std::string id() const = 0;
};

// Offline test encoder: each normalized token hashes to a bucket in
// [0, dim), bucket weights accumulate, the vector is then L2-normalized.
class HashedBagProvider final : public EmbeddingProvider {
 public:
  explicit HashedBagProvider(std::size_t dim);

  Embedding embed(std::string_view text) override;
  std::size_t dim() const override { return dim_; }
  std::string id() const override;

 private:
  std::size_t dim_;
};

struct RemoteEmbeddingConfig {
  std::string endpoint;       // e.g. http://host:port
  std::string path = "/v1/embeddings";
  std::string model;
  std::string api_key_env = "DETOX_API_KEY";
  int timeout_seconds = 30;
  int max_attempts = 5;
};

// OpenAI-style embeddings endpoint: POST {"model", "input"} ->
// {"data":[{"embedding":[...]}]}.
class RemoteEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit RemoteEmbeddingProvider(RemoteEmbeddingConfig config);
  ~RemoteEmbeddingProvider() override;

  Embedding embed(std::string_view text) override;
  std::size_t dim() const override { return dim_; }
  std::string id() const override;

 private:
  RemoteEmbeddingConfig config_;
  std::size_t dim_ = 0;  // learned from the first reply
};

struct EmbeddingIndex {
  std::vector<std::pair<std::string, Embedding>> entries;  // corpus order
  std::string provider_id;
  std::uint64_t corpus_hash = 0;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

// Embeds the toxic side of every pair, in corpus order.
EmbeddingIndex build_index(const Corpus& corpus, EmbeddingProvider& provider);

// Ids of the top-k entries by descending cosine; ties break by ascending
// index position. Returns fewer than k when the index is short.
std::vector<std::string> top_k(const Embedding& query,
                               const EmbeddingIndex& index, std::size_t k);

// JSONL cache: header line with provider id, dim and corpus hash, then one
// (id, vector) line per entry. The loader rejects mismatched hashes.
void save_index(const EmbeddingIndex& index, const std::filesystem::path& path);
EmbeddingIndex load_index(const std::filesystem::path& path,
                          std::uint64_t expected_corpus_hash);

// Builds or reloads the cached index for a corpus.
EmbeddingIndex load_or_build_index(const Corpus& corpus,
                                   EmbeddingProvider& provider,
                                   const std::filesystem::path& cache_dir);

}  // namespace gptdetox
