#include "gptdetox/generation.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "gptdetox/prompting.hpp"
#include "gptdetox/util.hpp"
#include "remote_common.hpp"

namespace gptdetox {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool iequals_prefix(std::string_view text, std::string_view prefix) {
  if (text.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i]))) {
      return false;
    }
  }
  return true;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool in_space = true;  // also trims leading whitespace
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
    } else {
      if (in_space && !out.empty()) out += ' ';
      out += c;
      in_space = false;
    }
  }
  return out;
}

// The query is the text after the zero-shot instruction, or the final
// "input:" block of a few-shot prompt.
std::string extract_query(const std::string& prompt) {
  if (prompt.rfind(kZeroShotInstruction, 0) == 0) {
    return prompt.substr(kZeroShotInstruction.size());
  }
  std::size_t pos = prompt.rfind("\ninput: ");
  if (pos == std::string::npos) return prompt;
  std::size_t start = pos + 8;
  std::size_t end = prompt.find("\noutput:", start);
  if (end == std::string::npos) end = prompt.size();
  return prompt.substr(start, end - start);
}

}  // namespace

GenerationResult postprocess_reply(std::string_view raw, bool truncated,
                                   const std::vector<std::string>& refusal_prefixes) {
  GenerationResult result;
  result.raw = std::string(raw);
  std::string text = trim(raw);
  if (iequals_prefix(text, "output:")) {
    text = trim(std::string_view(text).substr(7));
  }
  for (const auto& prefix : refusal_prefixes) {
    if (iequals_prefix(text, prefix)) {
      result.flags.refusal = true;
      break;
    }
  }
  result.flags.truncated = truncated;
  result.flags.empty = text.empty();
  result.text = std::move(text);
  return result;
}

std::string cache_key(const GenerationRequest& request) {
  char temp_buf[32];
  std::snprintf(temp_buf, sizeof(temp_buf), "%.17g", request.temperature);
  std::uint64_t h = fnv1a64(request.model);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(temp_buf, h);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(std::to_string(request.max_tokens), h);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(request.prompt, h);
  return to_hex(h);
}

MockBackend::MockBackend(ToxicLexicon lexicon) : lexicon_(std::move(lexicon)) {}

GenerationResult MockBackend::generate(const GenerationRequest& request) {
  if (request.prompt.empty()) {
    throw std::runtime_error("generate: empty prompt");
  }
  calls_.fetch_add(1);
  std::string query = extract_query(request.prompt);
  auto tokens = tokenize(query);
  auto matches = lexicon_.find_toxic_terms(normalize(query));
  std::string kept;
  std::size_t cursor = 0;
  for (const auto& m : matches) {
    std::size_t byte_begin = tokens[m.begin].begin;
    std::size_t byte_end = tokens[m.end - 1].end;
    kept += query.substr(cursor, byte_begin - cursor);
    cursor = byte_end;
  }
  kept += query.substr(cursor);
  return postprocess_reply(collapse_whitespace(kept));
}

RemoteChatBackend::RemoteChatBackend(RemoteChatConfig config)
    : config_(std::move(config)) {
  if (config_.endpoint.empty()) {
    throw std::runtime_error("remote backend requires an endpoint");
  }
}

std::string RemoteChatBackend::name() const {
  return "remote:" + config_.endpoint;
}

GenerationResult RemoteChatBackend::generate(const GenerationRequest& request) {
  if (request.prompt.empty()) {
    throw std::runtime_error("generate: empty prompt");
  }
  std::string key = detail::require_api_key(config_.api_key_env);
  std::string base = config_.endpoint;
  while (!base.empty() && base.back() == '/') base.pop_back();
  nlohmann::json body = {
      {"model", request.model},
      {"messages",
       nlohmann::json::array(
           {{{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens},
  };
  return detail::with_retries(
      config_.max_attempts, config_.backoff_base_seconds, [&]() {
        httplib::Client client(base);
        client.set_connection_timeout(config_.timeout_seconds);
        client.set_read_timeout(config_.timeout_seconds);
        httplib::Headers headers = {{"Authorization", "Bearer " + key}};
        auto res =
            client.Post(config_.path, headers, body.dump(), "application/json");
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
        const auto& choice = reply.at("choices").at(0);
        std::string content = choice.at("message").at("content").get<std::string>();
        bool truncated = choice.value("finish_reason", "stop") == "length";
        return postprocess_reply(content, truncated);
      });
}

CachingBackend::CachingBackend(std::filesystem::path cache_dir,
                               std::shared_ptr<GenerationBackend> inner)
    : cache_dir_(std::move(cache_dir)), inner_(std::move(inner)) {
  std::filesystem::create_directories(cache_dir_);
}

GenerationResult CachingBackend::generate(const GenerationRequest& request) {
  const std::string key = cache_key(request);
  const auto path = cache_dir_ / (key + ".json");

  std::shared_future<GenerationResult> future;
  bool owner = false;
  std::promise<GenerationResult> promise;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = in_flight_.find(key);
    if (it != in_flight_.end()) {
      future = it->second;
    } else {
      // Disk probe under the lock keeps hit/miss accounting exact.
      if (std::filesystem::exists(path)) {
        try {
          std::ifstream in(path);
          nlohmann::json entry = nlohmann::json::parse(in);
          if (entry.at("model").get<std::string>() == request.model &&
              entry.at("prompt").get<std::string>() == request.prompt &&
              entry.at("temperature").get<double>() == request.temperature &&
              entry.at("max_tokens").get<int>() == request.max_tokens) {
            return postprocess_reply(entry.at("raw").get<std::string>(),
                                     entry.value("truncated", false));
          }
          std::cerr << "warning: cache entry " << key
                    << " does not match request fingerprint; regenerating\n";
        } catch (const std::exception& e) {
          std::cerr << "warning: corrupt cache entry " << key << " (" << e.what()
                    << "); regenerating\n";
        }
      }
      future = promise.get_future().share();
      in_flight_.emplace(key, future);
      owner = true;
    }
  }

  if (!owner) {
    return future.get();
  }

  try {
    GenerationResult result = inner_->generate(request);
    backend_calls_.fetch_add(1);
    nlohmann::json entry = {
        {"key", key},
        {"model", request.model},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
        {"prompt", request.prompt},
        {"raw", result.raw},
        {"truncated", result.flags.truncated},
        {"timestamp",
         std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
             .count()},
    };
    // Write-then-rename so readers never see partial entries.
    auto tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp);
      out << entry.dump();
    }
    std::filesystem::rename(tmp, path);
    promise.set_value(result);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      in_flight_.erase(key);
    }
    return result;
  } catch (...) {
    promise.set_exception(std::current_exception());
    {
      std::lock_guard<std::mutex> lock(mutex_);
      in_flight_.erase(key);
    }
    throw;
  }
}

std::vector<CacheEntryInfo> list_cache(const std::filesystem::path& cache_dir) {
  std::vector<CacheEntryInfo> entries;
  if (!std::filesystem::exists(cache_dir)) return entries;
  for (const auto& file : std::filesystem::directory_iterator(cache_dir)) {
    if (file.path().extension() != ".json") continue;
    CacheEntryInfo info;
    info.key = file.path().stem().string();
    try {
      std::ifstream in(file.path());
      nlohmann::json entry = nlohmann::json::parse(in);
      info.model = entry.value("model", std::string{});
      if (entry.contains("timestamp")) {
        info.timestamp = std::to_string(entry.at("timestamp").get<long long>());
      }
    } catch (const std::exception&) {
      info.model = "<corrupt>";
    }
    entries.push_back(std::move(info));
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.key < b.key; });
  return entries;
}

std::size_t clear_cache(const std::filesystem::path& cache_dir) {
  std::size_t removed = 0;
  if (!std::filesystem::exists(cache_dir)) return removed;
  for (const auto& file : std::filesystem::directory_iterator(cache_dir)) {
    if (file.path().extension() == ".json") {
      std::filesystem::remove(file.path());
      ++removed;
    }
  }
  return removed;
}

}  // namespace gptdetox
