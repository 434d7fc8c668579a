#include "gptdetox/scoring.hpp"

#include <algorithm>
#include <stdexcept>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "remote_common.hpp"

namespace gptdetox {

double j_score(const ScoreTriple& t) { return t.sta * t.sim * t.fl; }

double s_score(const ScoreTriple& t) { return (t.sta + t.sim) / 2.0; }

HeuristicStaScorer::HeuristicStaScorer(ToxicLexicon lexicon)
    : lexicon_(std::move(lexicon)) {}

double HeuristicStaScorer::score(std::string_view output) {
  if (output.empty()) {
    throw std::runtime_error("score_sta: empty output");
  }
  return lexicon_.find_toxic_terms(output).empty() ? 1.0 : 0.0;
}

EmbeddingSimScorer::EmbeddingSimScorer(
    std::shared_ptr<EmbeddingProvider> provider)
    : provider_(std::move(provider)) {}

double EmbeddingSimScorer::score(std::string_view input,
                                 std::string_view output) {
  if (input.empty() || output.empty()) {
    throw std::runtime_error("score_sim: both texts must be non-empty");
  }
  double value = cosine(provider_->embed(input), provider_->embed(output));
  return std::clamp(value, 0.0, 1.0);
}

std::string EmbeddingSimScorer::id() const {
  return "sim-embedding:" + provider_->id();
}

double HeuristicFlScorer::score(std::string_view output) {
  if (output.empty()) {
    throw std::runtime_error("score_fl: empty output");
  }
  unsigned char first = static_cast<unsigned char>(output.front());
  bool starts_with_letter = (first >= 'a' && first <= 'z') ||
                            (first >= 'A' && first <= 'Z') || first >= 0x80;
  return starts_with_letter && normalize(output).size() >= 2 ? 1.0 : 0.0;
}

RemoteClassifierScorer::RemoteClassifierScorer(RemoteScorerConfig config)
    : config_(std::move(config)) {
  if (config_.endpoint.empty() || config_.path.empty()) {
    throw std::runtime_error("remote scorer requires endpoint and path");
  }
}

double RemoteClassifierScorer::score(std::string_view output) {
  if (output.empty()) {
    throw std::runtime_error("remote scorer: empty output");
  }
  std::string key = detail::require_api_key(config_.api_key_env);
  std::string base = config_.endpoint;
  while (!base.empty() && base.back() == '/') base.pop_back();
  nlohmann::json body = {{"text", std::string(output)}};
  return detail::with_retries(config_.max_attempts, 1.0, [&]() {
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
    double p = nlohmann::json::parse(res->body).at("probability").get<double>();
    if (p < 0.0 || p > 1.0) {
      throw detail::NonRetryableError("classifier probability out of [0,1]");
    }
    return p;
  });
}

std::string RemoteClassifierScorer::id() const {
  return "remote-classifier:" + config_.endpoint + config_.path;
}

ScoreTriple ScorerSet::score(std::string_view input,
                             std::string_view output) const {
  ScoreTriple t;
  t.sta = sta->score(output);
  t.sim = sim->score(input, output);
  t.fl = fl->score(output);
  return t;
}

ScorerSet make_heuristic_scorers(ToxicLexicon lexicon,
                                 std::shared_ptr<EmbeddingProvider> provider) {
  ScorerSet set;
  set.sta = std::make_shared<HeuristicStaScorer>(std::move(lexicon));
  set.sim = std::make_shared<EmbeddingSimScorer>(std::move(provider));
  set.fl = std::make_shared<HeuristicFlScorer>();
  return set;
}

}  // namespace gptdetox
