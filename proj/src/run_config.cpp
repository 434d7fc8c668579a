#include "gptdetox/run_config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace gptdetox {

namespace {

using ordered_json = nlohmann::ordered_json;

DatasetConfig parse_dataset(const nlohmann::json& obj) {
  DatasetConfig d;
  d.path = obj.value("path", std::string{});
  d.format = obj.value("format", std::string{"tsv"});
  d.header = obj.value("header", false);
  d.split = obj.value("split", std::string{"unsplit"});
  d.split_seed = obj.value("split_seed", 0ull);
  if (obj.contains("ratios")) {
    const auto& r = obj.at("ratios");
    d.ratios.train = r.value("train", 0.8);
    d.ratios.validation = r.value("validation", 0.1);
    d.ratios.test = r.value("test", 0.1);
  }
  return d;
}

ordered_json dataset_json(const DatasetConfig& d) {
  return ordered_json{{"path", d.path},
                      {"format", d.format},
                      {"header", d.header},
                      {"split", d.split},
                      {"split_seed", d.split_seed},
                      {"ratios",
                       ordered_json{{"train", d.ratios.train},
                                    {"validation", d.ratios.validation},
                                    {"test", d.ratios.test}}}};
}

}  // namespace

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path.string());
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
  }

  RunConfig c;
  if (doc.contains("dataset")) c.dataset = parse_dataset(doc.at("dataset"));
  c.train_dataset =
      doc.contains("train_dataset") ? parse_dataset(doc.at("train_dataset")) : c.dataset;
  c.lexicon_path = doc.value("lexicon", std::string{});
  if (doc.contains("grid")) {
    const auto& g = doc.at("grid");
    c.zero_shot = g.value("zero_shot", true);
    if (g.contains("strategies")) {
      c.strategies = g.at("strategies").get<std::vector<std::string>>();
    }
    if (g.contains("ks")) c.ks = g.at("ks").get<std::vector<int>>();
  }
  c.scoring = doc.value("scoring", std::string{"j"});
  c.threshold = doc.value("threshold", 0.5);
  c.seed = doc.value("seed", 0ull);
  c.eicl = doc.value("eicl", true);
  c.max_failure_fraction = doc.value("max_failure_fraction", 0.0);
  c.output_dir = doc.value("output_dir", std::string{"detox-out"});
  c.cache_dir = doc.value("cache_dir", std::string{"detox-cache"});
  if (doc.contains("generation")) {
    const auto& g = doc.at("generation");
    c.generation.backend = g.value("backend", std::string{"mock"});
    c.generation.model = g.value("model", std::string{"gpt-3.5-turbo"});
    c.generation.temperature = g.value("temperature", 0.0);
    c.generation.max_tokens = g.value("max_tokens", 256);
    c.generation.endpoint = g.value("endpoint", std::string{});
    c.generation.api_key_env = g.value("api_key_env", std::string{"DETOX_API_KEY"});
    c.generation.concurrency = g.value("concurrency", 4);
    c.generation.max_attempts = g.value("max_attempts", 5);
  }
  if (doc.contains("embedding")) {
    const auto& e = doc.at("embedding");
    c.embedding.kind = e.value("kind", std::string{"deterministic-test"});
    c.embedding.dim = e.value("dim", 64u);
    c.embedding.endpoint = e.value("endpoint", std::string{});
    c.embedding.model = e.value("model", std::string{});
    c.embedding.api_key_env = e.value("api_key_env", std::string{"DETOX_API_KEY"});
  }
  if (doc.contains("scorers")) {
    const auto& s = doc.at("scorers");
    c.scorers.sta = s.value("sta", std::string{"lexicon-heuristic"});
    c.scorers.fl = s.value("fl", std::string{"heuristic"});
    c.scorers.sim = s.value("sim", std::string{"test-embedding"});
    c.scorers.sta_endpoint = s.value("sta_endpoint", std::string{});
    c.scorers.sta_path = s.value("sta_path", std::string{});
    c.scorers.fl_endpoint = s.value("fl_endpoint", std::string{});
    c.scorers.fl_path = s.value("fl_path", std::string{});
  }
  return c;
}

void RunConfig::validate() const {
  if (dataset.path.empty()) {
    throw ConfigError("config field 'dataset.path' is required");
  }
  if (!std::filesystem::exists(dataset.path)) {
    throw ConfigError("config field 'dataset.path' does not exist: " + dataset.path);
  }
  if (!train_dataset.path.empty() && !std::filesystem::exists(train_dataset.path)) {
    throw ConfigError("config field 'train_dataset.path' does not exist: " +
                      train_dataset.path);
  }
  if (lexicon_path.empty()) {
    throw ConfigError("config field 'lexicon' is required");
  }
  if (!std::filesystem::exists(lexicon_path)) {
    throw ConfigError("config field 'lexicon' does not exist: " + lexicon_path);
  }
  if (!zero_shot && strategies.empty()) {
    throw ConfigError("config field 'grid.strategies' must be non-empty when zero_shot is disabled");
  }
  if (!strategies.empty() && ks.empty()) {
    throw ConfigError("config field 'grid.ks' must be non-empty");
  }
  static const std::set<std::string> known = {"random", "wmes", "cmes"};
  for (const auto& s : strategies) {
    if (!known.count(s)) {
      throw ConfigError("config field 'grid.strategies' has unknown strategy: " + s);
    }
  }
  for (int k : ks) {
    if (k < 1) {
      throw ConfigError("config field 'grid.ks' must contain positive values");
    }
  }
  if (scoring != "s" && scoring != "j") {
    throw ConfigError("config field 'scoring' must be 's' or 'j'");
  }
  if (threshold <= 0.0 || threshold >= 1.0) {
    throw ConfigError("config field 'threshold' must be in (0,1)");
  }
  if (generation.backend != "mock" && generation.backend != "remote") {
    throw ConfigError("config field 'generation.backend' must be 'mock' or 'remote'");
  }
  if (generation.backend == "remote" && generation.endpoint.empty()) {
    throw ConfigError("config field 'generation.endpoint' is required for the remote backend");
  }
  if (embedding.kind != "deterministic-test" && embedding.kind != "remote-api") {
    throw ConfigError("config field 'embedding.kind' must be 'deterministic-test' or 'remote-api'");
  }
  if (embedding.kind == "deterministic-test" && embedding.dim < 8) {
    throw ConfigError("config field 'embedding.dim' must be >= 8");
  }
  if (embedding.kind == "remote-api" &&
      (embedding.endpoint.empty() || embedding.model.empty())) {
    throw ConfigError("config fields 'embedding.endpoint' and 'embedding.model' are required for remote-api");
  }
  if (max_failure_fraction < 0.0 || max_failure_fraction > 1.0) {
    throw ConfigError("config field 'max_failure_fraction' must be in [0,1]");
  }
  if (output_dir.empty()) {
    throw ConfigError("config field 'output_dir' is required");
  }
}

std::string RunConfig::resolved_json() const {
  ordered_json doc;
  doc["dataset"] = dataset_json(dataset);
  doc["train_dataset"] = dataset_json(train_dataset);
  doc["lexicon"] = lexicon_path;
  doc["grid"] = ordered_json{
      {"zero_shot", zero_shot}, {"strategies", strategies}, {"ks", ks}};
  doc["scoring"] = scoring;
  doc["threshold"] = threshold;
  doc["seed"] = seed;
  doc["eicl"] = eicl;
  doc["max_failure_fraction"] = max_failure_fraction;
  doc["output_dir"] = output_dir;
  doc["cache_dir"] = cache_dir;
  doc["generation"] = ordered_json{{"backend", generation.backend},
                                   {"model", generation.model},
                                   {"temperature", generation.temperature},
                                   {"max_tokens", generation.max_tokens},
                                   {"endpoint", generation.endpoint},
                                   {"api_key_env", generation.api_key_env},
                                   {"concurrency", generation.concurrency},
                                   {"max_attempts", generation.max_attempts}};
  doc["embedding"] = ordered_json{{"kind", embedding.kind},
                                  {"dim", embedding.dim},
                                  {"endpoint", embedding.endpoint},
                                  {"model", embedding.model},
                                  {"api_key_env", embedding.api_key_env}};
  doc["scorers"] = ordered_json{{"sta", scorers.sta},
                                {"fl", scorers.fl},
                                {"sim", scorers.sim},
                                {"sta_endpoint", scorers.sta_endpoint},
                                {"sta_path", scorers.sta_path},
                                {"fl_endpoint", scorers.fl_endpoint},
                                {"fl_path", scorers.fl_path}};
  return doc.dump(2);
}

}  // namespace gptdetox
