#include "gptdetox/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "gptdetox/lexicon.hpp"
#include "gptdetox/util.hpp"
#include "remote_common.hpp"

namespace gptdetox {

namespace {

double norm(const Embedding& v) {
  double s = 0.0;
  for (double x : v.values) s += x * x;
  return std::sqrt(s);
}

void split_host(const std::string& endpoint, std::string& host_part) {
  host_part = endpoint;
  while (!host_part.empty() && host_part.back() == '/') host_part.pop_back();
}

}  // namespace

double cosine(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw std::runtime_error("cosine: dimension mismatch (" +
                             std::to_string(a.dim()) + " vs " +
                             std::to_string(b.dim()) + ")");
  }
  double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) {
    throw std::runtime_error("cosine: zero vector");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) dot += a.values[i] * b.values[i];
  return dot / (na * nb);
}

HashedBagProvider::HashedBagProvider(std::size_t dim) : dim_(dim) {
  if (dim_ < 8) {
    throw std::runtime_error("test embedding provider requires dim >= 8");
  }
}

Embedding HashedBagProvider::embed(std::string_view text) {
  if (text.empty()) {
    throw std::runtime_error("cannot embed empty text");
  }
  auto tokens = normalize(text);
  if (tokens.empty()) {
    throw std::runtime_error("cannot embed text with no tokens: " +
                             std::string(text));
  }
  Embedding out;
  out.values.assign(dim_, 0.0);
  for (const auto& tok : tokens) {
    out.values[fnv1a64(tok) % dim_] += 1.0;
  }
  double n = norm(out);
  for (double& x : out.values) x /= n;
  return out;
}

std::string HashedBagProvider::id() const {
  return "hashed-bag-d" + std::to_string(dim_);
}

RemoteEmbeddingProvider::RemoteEmbeddingProvider(RemoteEmbeddingConfig config)
    : config_(std::move(config)) {
  if (config_.endpoint.empty() || config_.model.empty()) {
    throw std::runtime_error("remote embedding provider requires endpoint and model");
  }
}

RemoteEmbeddingProvider::~RemoteEmbeddingProvider() = default;

Embedding RemoteEmbeddingProvider::embed(std::string_view text) {
  if (text.empty()) {
    throw std::runtime_error("cannot embed empty text");
  }
  std::string key = detail::require_api_key(config_.api_key_env);
  std::string base;
  split_host(config_.endpoint, base);
  nlohmann::json body = {{"model", config_.model}, {"input", std::string(text)}};
  auto values = detail::with_retries(config_.max_attempts, 1.0, [&]() {
    httplib::Client client(base);
    client.set_connection_timeout(config_.timeout_seconds);
    client.set_read_timeout(config_.timeout_seconds);
    httplib::Headers headers = {{"Authorization", "Bearer " + key}};
    auto res = client.Post(config_.path, headers, body.dump(), "application/json");
    if (!res) {
      throw std::runtime_error("connection failed: " + base);
    }
    if (res->status == 401 || res->status == 403) {
      throw detail::NonRetryableError("authentication failed (HTTP " +
                                      std::to_string(res->status) + ")");
    }
    if (res->status != 200) {
      throw std::runtime_error("HTTP " + std::to_string(res->status));
    }
    auto reply = nlohmann::json::parse(res->body);
    return reply.at("data").at(0).at("embedding").get<std::vector<double>>();
  });
  if (dim_ == 0) dim_ = values.size();
  if (values.size() != dim_ || values.empty()) {
    throw std::runtime_error("remote embedding has unexpected dimension");
  }
  return Embedding{std::move(values)};
}

std::string RemoteEmbeddingProvider::id() const {
  return "remote:" + config_.model;
}

EmbeddingIndex build_index(const Corpus& corpus, EmbeddingProvider& provider) {
  EmbeddingIndex index;
  index.provider_id = provider.id();
  index.corpus_hash = corpus.content_hash();
  index.entries.reserve(corpus.size());
  for (const auto& pair : corpus.pairs) {
    index.entries.emplace_back(pair.id, provider.embed(pair.toxic));
  }
  return index;
}

std::vector<std::string> top_k(const Embedding& query,
                               const EmbeddingIndex& index, std::size_t k) {
  if (index.empty()) {
    throw std::runtime_error("top_k: empty index");
  }
  if (k < 1) {
    throw std::runtime_error("top_k: k must be >= 1");
  }
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(index.size());
  for (std::size_t i = 0; i < index.entries.size(); ++i) {
    scored.emplace_back(cosine(query, index.entries[i].second), i);
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.first > b.first;  // stable sort keeps earlier positions first on ties
  });
  std::size_t take = std::min(k, scored.size());
  std::vector<std::string> ids;
  ids.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    ids.push_back(index.entries[scored[i].second].first);
  }
  return ids;
}

void save_index(const EmbeddingIndex& index, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write index to: " + path.string());
  }
  std::size_t dim = index.empty() ? 0 : index.entries.front().second.dim();
  nlohmann::json header = {{"provider_id", index.provider_id},
                           {"dim", dim},
                           {"corpus_hash", to_hex(index.corpus_hash)}};
  out << header.dump() << '\n';
  for (const auto& [id, emb] : index.entries) {
    nlohmann::json line = {{"id", id}, {"vector", emb.values}};
    out << line.dump() << '\n';
  }
}

EmbeddingIndex load_index(const std::filesystem::path& path,
                          std::uint64_t expected_corpus_hash) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open index file: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("index file is empty: " + path.string());
  }
  auto header = nlohmann::json::parse(line);
  EmbeddingIndex index;
  index.provider_id = header.at("provider_id").get<std::string>();
  std::string hash_hex = header.at("corpus_hash").get<std::string>();
  index.corpus_hash = std::stoull(hash_hex, nullptr, 16);
  if (index.corpus_hash != expected_corpus_hash) {
    throw std::runtime_error("index corpus hash mismatch; rebuild required");
  }
  std::size_t dim = header.at("dim").get<std::size_t>();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto obj = nlohmann::json::parse(line);
    Embedding emb{obj.at("vector").get<std::vector<double>>()};
    if (emb.dim() != dim) {
      throw std::runtime_error("index entry dimension mismatch");
    }
    index.entries.emplace_back(obj.at("id").get<std::string>(), std::move(emb));
  }
  return index;
}

EmbeddingIndex load_or_build_index(const Corpus& corpus,
                                   EmbeddingProvider& provider,
                                   const std::filesystem::path& cache_dir) {
  std::filesystem::create_directories(cache_dir);
  std::uint64_t key =
      mix_seed(fnv1a64(provider.id()), corpus.content_hash());
  auto path = cache_dir / ("index-" + to_hex(key) + ".jsonl");
  if (std::filesystem::exists(path)) {
    try {
      auto index = load_index(path, corpus.content_hash());
      if (index.provider_id == provider.id()) return index;
    } catch (const std::exception&) {
      // fall through and rebuild
    }
  }
  auto index = build_index(corpus, provider);
  save_index(index, path);
  return index;
}

}  // namespace gptdetox
