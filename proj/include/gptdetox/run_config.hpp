#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gptdetox/corpus.hpp"

namespace gptdetox {

// Raised for invalid configuration/usage; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetConfig {
  std::string path;
  std::string format = "tsv";
  bool header = false;
  std::string split = "unsplit";
  SplitRatios ratios;
  std::uint64_t split_seed = 0;
};

struct GenerationConfig {
  std::string backend = "mock";  // mock | remote
  std::string model = "gpt-3.5-turbo";
  double temperature = 0.0;
  int max_tokens = 256;
  std::string endpoint;
  std::string api_key_env = "DETOX_API_KEY";
  int concurrency = 4;
  int max_attempts = 5;
};

struct EmbeddingConfig {
  std::string kind = "deterministic-test";  // deterministic-test | remote-api
  std::size_t dim = 64;
  std::string endpoint;
  std::string model;
  std::string api_key_env = "DETOX_API_KEY";
};

struct ScorerBackendsConfig {
  std::string sta = "lexicon-heuristic";  // lexicon-heuristic | remote-classifier
  std::string fl = "heuristic";           // heuristic | remote-classifier
  std::string sim = "test-embedding";     // test-embedding | remote-embedding
  std::string sta_endpoint, sta_path;
  std::string fl_endpoint, fl_path;
};

struct RunConfig {
  DatasetConfig dataset;        // evaluation inputs
  DatasetConfig train_dataset;  // example pool; defaults to `dataset`
  std::string lexicon_path;
  bool zero_shot = true;
  std::vector<std::string> strategies = {"random", "wmes", "cmes"};
  std::vector<int> ks = {1, 3, 5, 8, 10};
  std::string scoring = "j";
  double threshold = 0.5;
  std::uint64_t seed = 0;
  bool eicl = true;
  double max_failure_fraction = 0.0;
  std::string output_dir = "detox-out";
  std::string cache_dir = "detox-cache";
  GenerationConfig generation;
  EmbeddingConfig embedding;
  ScorerBackendsConfig scorers;

  static RunConfig from_file(const std::filesystem::path& path);
  // Throws ConfigError naming the offending field.
  void validate() const;
  std::string resolved_json() const;
};

}  // namespace gptdetox
