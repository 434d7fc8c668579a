#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "gptdetox/lexicon.hpp"

namespace gptdetox {

struct GenerationRequest {
  std::string prompt;
  std::string model;
  double temperature = 0.0;
  int max_tokens = 256;
};

struct GenerationFlags {
  bool refusal = false;
  bool truncated = false;
  bool empty = false;
};

struct GenerationResult {
  std::string text;  // raw after trimming and stripping a leading "output:" echo
  std::string raw;
  GenerationFlags flags;
};

inline const std::vector<std::string> kDefaultRefusalPrefixes = {
    "I'm sorry", "I am sorry", "I cannot", "I can't", "As an AI",
};

GenerationResult postprocess_reply(
    std::string_view raw, bool truncated = false,
    const std::vector<std::string>& refusal_prefixes = kDefaultRefusalPrefixes);

// Digest of (model, temperature, max_tokens, prompt); any field change
// yields a different key.
std::string cache_key(const GenerationRequest& request);

class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual GenerationResult generate(const GenerationRequest& request) = 0;
  virtual std::string name() const = 0;
};

// Offline test double: pulls the final query sentence out of the prompt,
// deletes lexicon-matched tokens, collapses whitespace.
class MockBackend final : public GenerationBackend {
 public:
  explicit MockBackend(ToxicLexicon lexicon);

  GenerationResult generate(const GenerationRequest& request) override;
  std::string name() const override { return "mock"; }
  std::uint64_t call_count() const { return calls_.load(); }

 private:
  ToxicLexicon lexicon_;
  std::atomic<std::uint64_t> calls_{0};
};

struct RemoteChatConfig {
  std::string endpoint;  // e.g. https://api.openai.com
  std::string path = "/v1/chat/completions";
  std::string api_key_env = "DETOX_API_KEY";
  int timeout_seconds = 60;
  int max_attempts = 5;
  double backoff_base_seconds = 1.0;
};

// Chat-style completion over HTTPS with JSON bodies; retries rate limits
// and transient failures with exponential backoff, fails fast on auth.
class RemoteChatBackend final : public GenerationBackend {
 public:
  explicit RemoteChatBackend(RemoteChatConfig config);

  GenerationResult generate(const GenerationRequest& request) override;
  std::string name() const override;

 private:
  RemoteChatConfig config_;
};

/// Persistent per-request cache around any backend. Hits skip the backend;
/// concurrent misses for one key make a single backend call.
class CachingBackend final : public GenerationBackend {
 public:
  CachingBackend(std::filesystem::path cache_dir,
                 std::shared_ptr<GenerationBackend> inner);

  GenerationResult generate(const GenerationRequest& request) override;
  std::string name() const override { return "cached(" + inner_->name() + ")"; }
  std::uint64_t backend_calls() const { return backend_calls_.load(); }

 private:
  std::filesystem::path cache_dir_;
  std::shared_ptr<GenerationBackend> inner_;
  std::atomic<std::uint64_t> backend_calls_{0};
  std::mutex mutex_;
  std::map<std::string, std::shared_future<GenerationResult>> in_flight_;
};

struct CacheEntryInfo {
  std::string key;
  std::string model;
  std::string timestamp;
};

std::vector<CacheEntryInfo> list_cache(const std::filesystem::path& cache_dir);
std::size_t clear_cache(const std::filesystem::path& cache_dir);

}  // namespace gptdetox
