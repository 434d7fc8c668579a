// Command-line front end for the detoxification pipeline: per-sentence
// ensemble detoxification, example-selection inspection, prompt rendering,
// full experiment runs, report tables, and cache management.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gptdetox/ensemble.hpp"
#include "gptdetox/evaluation.hpp"
#include "gptdetox/runner.hpp"
#include "gptdetox/util.hpp"

#ifndef GPTDETOX_DEFAULT_FIXTURES
#define GPTDETOX_DEFAULT_FIXTURES ""
#endif

namespace {

using namespace gptdetox;
using ordered_json = nlohmann::ordered_json;

struct PipelineOptions {
  std::string train_path;
  std::string train_format = "tsv";
  bool train_header = false;
  std::string lexicon_path;
  std::string backend = "mock";
  std::string endpoint;
  std::string model = "gpt-3.5-turbo";
  double temperature = 0.0;
  int max_tokens = 256;
  std::string api_key_env = "DETOX_API_KEY";
  std::size_t embed_dim = 64;
  std::string embed_kind = "deterministic-test";
  std::string embed_endpoint;
  std::string embed_model;
  std::string scoring = "j";
  std::uint64_t seed = 0;
  std::string cache_dir = ".detox-cache";
  int concurrency = 4;
  bool zero_shot = true;
  std::vector<std::string> strategies = {"random", "wmes", "cmes"};
  std::vector<int> ks = {1, 3, 5, 8, 10};
};

void add_pipeline_options(CLI::App& cmd, PipelineOptions& opt) {
  cmd.add_option("--train", opt.train_path, "Training corpus (example pool)")
      ->required();
  cmd.add_option("--train-format", opt.train_format, "tsv or jsonl");
  cmd.add_flag("--train-header", opt.train_header, "Skip the first line");
  cmd.add_option("--lexicon", opt.lexicon_path, "Toxic lexicon file")->required();
  cmd.add_option("--backend", opt.backend, "mock or remote");
  cmd.add_option("--endpoint", opt.endpoint, "Remote generation endpoint");
  cmd.add_option("--model", opt.model, "Generation model name");
  cmd.add_option("--temperature", opt.temperature, "Sampling temperature");
  cmd.add_option("--max-tokens", opt.max_tokens, "Generation token limit");
  cmd.add_option("--api-key-env", opt.api_key_env, "Credential variable name");
  cmd.add_option("--embed-dim", opt.embed_dim, "Test embedding dimension");
  cmd.add_option("--embed-kind", opt.embed_kind,
                 "deterministic-test or remote-api");
  cmd.add_option("--embed-endpoint", opt.embed_endpoint, "Remote embedding endpoint");
  cmd.add_option("--embed-model", opt.embed_model, "Remote embedding model");
  cmd.add_option("--scoring", opt.scoring, "Ensemble scoring function: s or j");
  cmd.add_option("--seed", opt.seed, "Random-selection seed");
  cmd.add_option("--cache-dir", opt.cache_dir, "Generation/embedding cache");
  cmd.add_option("--concurrency", opt.concurrency, "In-flight request bound");
  cmd.add_flag("!--no-zero-shot", opt.zero_shot, "Drop the zero-shot setting");
  cmd.add_option("--strategies", opt.strategies,
                 "Few-shot strategies (random wmes cmes)");
  cmd.add_option("--ks", opt.ks, "k grid for few-shot settings");
}

RunConfig to_run_config(const PipelineOptions& opt) {
  RunConfig config;
  config.dataset.path = opt.train_path;
  config.dataset.format = opt.train_format;
  config.dataset.header = opt.train_header;
  config.train_dataset = config.dataset;
  config.lexicon_path = opt.lexicon_path;
  config.zero_shot = opt.zero_shot;
  config.strategies = opt.strategies;
  config.ks = opt.ks;
  config.scoring = opt.scoring;
  config.seed = opt.seed;
  config.cache_dir = opt.cache_dir;
  config.generation.backend = opt.backend;
  config.generation.endpoint = opt.endpoint;
  config.generation.model = opt.model;
  config.generation.temperature = opt.temperature;
  config.generation.max_tokens = opt.max_tokens;
  config.generation.api_key_env = opt.api_key_env;
  config.generation.concurrency = opt.concurrency;
  config.embedding.kind = opt.embed_kind;
  config.embedding.dim = opt.embed_dim;
  config.embedding.endpoint = opt.embed_endpoint;
  config.embedding.model = opt.embed_model;
  return config;
}

std::vector<std::string> read_inputs(const std::vector<std::string>& texts,
                                     const std::string& file) {
  std::vector<std::string> inputs = texts;
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) {
      throw ConfigError("cannot open input file: " + file);
    }
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) inputs.push_back(line);
    }
  }
  if (inputs.empty()) {
    throw ConfigError("no inputs: pass --text or --file");
  }
  return inputs;
}

ordered_json candidate_json(const Candidate& c) {
  return ordered_json{{"setting", c.setting_id},
                      {"output", c.output},
                      {"sta", c.scores.sta},
                      {"sim", c.scores.sim},
                      {"fl", c.scores.fl},
                      {"s", s_score(c.scores)},
                      {"j", j_score(c.scores)},
                      {"ensemble_score", c.ensemble_score},
                      {"refusal", c.flags.refusal}};
}

int cmd_detoxify(const PipelineOptions& opt, const std::vector<std::string>& texts,
                 const std::string& file, const std::string& audit_path,
                 const std::string& out_path) {
  RunConfig config = to_run_config(opt);
  auto inputs = read_inputs(texts, file);
  auto bundle = build_pipeline(config);

  std::ofstream audit;
  if (!audit_path.empty()) audit.open(audit_path);
  std::vector<OutputRecord> records;

  for (std::size_t i = 0; i < inputs.size(); ++i) {
    EiclResult result = bundle.pipeline->run(inputs[i]);
    const Candidate& best = result.candidates[result.best_index];
    std::cout << best.output << '\n';
    if (audit.is_open()) {
      for (const auto& c : result.candidates) {
        ordered_json obj = candidate_json(c);
        obj["id"] = std::to_string(i);
        obj["input"] = inputs[i];
        obj["winner"] = (&c == &best);
        audit << obj.dump() << '\n';
      }
    }
    OutputRecord record;
    record.id = std::to_string(i);
    record.input = inputs[i];
    record.output = best.output;
    record.prompt_setting = best.setting_id;
    record.sta = best.scores.sta;
    record.sim = best.scores.sim;
    record.fl = best.scores.fl;
    record.s = s_score(best.scores);
    record.j = j_score(best.scores);
    record.refusal = best.flags.refusal;
    records.push_back(std::move(record));
  }
  if (!out_path.empty()) save_outputs(records, out_path);
  return 0;
}

int cmd_select_examples(const PipelineOptions& opt, const std::string& text,
                        const std::string& strategy, int k) {
  RunConfig config = to_run_config(opt);
  auto bundle = build_pipeline(config);
  SelectionStrategy setting{strategy_kind_from_name(strategy), k, opt.seed};
  if (setting.kind == StrategyKind::kZeroShot) {
    throw ConfigError("select-examples needs a few-shot strategy");
  }
  ExampleSet set = bundle.pipeline->select_examples(text, setting);
  for (const auto& e : set.examples) {
    ordered_json obj = {{"id", e.pair.id},
                        {"toxic", e.pair.toxic},
                        {"neutral", e.pair.neutral},
                        {"backfilled", e.backfilled}};
    if (setting.kind == StrategyKind::kWmes) obj["match_terms"] = e.match_terms;
    if (setting.kind == StrategyKind::kCmes) obj["similarity"] = e.similarity;
    std::cout << obj.dump() << '\n';
  }
  if (set.shortfall > 0) {
    std::cerr << "note: pool was short by " << set.shortfall << " example(s)\n";
  }
  return 0;
}

int cmd_render(const PipelineOptions& opt, const std::string& text,
               const std::string& strategy, int k) {
  StrategyKind kind = strategy_kind_from_name(strategy);
  if (kind == StrategyKind::kZeroShot) {
    std::cout << render_zero_shot(text) << '\n';
    return 0;
  }
  RunConfig config = to_run_config(opt);
  auto bundle = build_pipeline(config);
  SelectionStrategy setting{kind, k, opt.seed};
  std::cout << bundle.pipeline->render_prompt(text, setting) << '\n';
  return 0;
}

int cmd_run(const std::string& config_path) {
  RunConfig config = RunConfig::from_file(config_path);
  config.validate();
  RunArtifacts artifacts = execute_run(config);
  std::cout << "run complete: " << artifacts.rows.size() << " settings, "
            << artifacts.failed_records << "/" << artifacts.total_records
            << " records failed; artifacts in " << artifacts.output_dir.string()
            << '\n';
  if (artifacts.failure_budget_exceeded) {
    std::cerr << "error: failure fraction exceeds configured budget\n";
    return 1;
  }
  return 0;
}

int cmd_report(const std::string& fixtures_sel, const std::string& fixtures_file,
               const std::vector<std::string>& run_dirs) {
  std::vector<FixtureRow> fixtures;
  if (!fixtures_sel.empty()) {
    std::string path = fixtures_file;
    if (path.empty()) path = GPTDETOX_DEFAULT_FIXTURES;
    if (path.empty()) {
      throw ConfigError("no fixtures file available; pass --fixtures-file");
    }
    auto all = load_fixtures(path);
    for (auto& row : all) {
      if (fixtures_sel == "all" || row.dataset == fixtures_sel) {
        fixtures.push_back(std::move(row));
      }
    }
  }
  std::vector<RunRow> runs;
  for (const auto& dir : run_dirs) {
    std::filesystem::path report_path = std::filesystem::path(dir) / "report.json";
    std::ifstream in(report_path);
    if (!in) {
      throw std::runtime_error("missing run artifact: " + report_path.string() +
                               " (expected a completed `run` output directory)");
    }
    nlohmann::json doc = nlohmann::json::parse(in);
    std::string dataset = doc.at("metadata").at("dataset").get<std::string>();
    for (const auto& row : doc.at("rows")) {
      CorpusMetrics m;
      m.setting_id = row.at("setting").get<std::string>();
      m.sta = row.at("sta").get<double>();
      m.sim = row.at("sim").get<double>();
      m.fl = row.at("fl").get<double>();
      m.j = row.at("j").get<double>();
      m.j_mean_per_sentence = row.at("j_mean_per_sentence").get<double>();
      m.n = row.at("n").get<std::size_t>();
      runs.push_back(RunRow{dataset, m.setting_id, m});
    }
  }
  if (!runs.empty()) {
    for (auto& f : fixtures) f.dataset = runs.front().dataset;
  }
  std::cout << compare_runs(runs, fixtures);
  return 0;
}

int cmd_cache(const std::string& action, const std::string& cache_dir) {
  std::filesystem::path dir = std::filesystem::path(cache_dir) / "generations";
  if (action == "list") {
    for (const auto& entry : list_cache(dir)) {
      std::cout << entry.key << '\t' << entry.model << '\t' << entry.timestamp
                << '\n';
    }
    return 0;
  }
  if (action == "clear") {
    std::size_t removed = clear_cache(dir);
    std::cout << "removed " << removed << " cache entr"
              << (removed == 1 ? "y" : "ies") << '\n';
    return 0;
  }
  throw ConfigError("cache action must be 'list' or 'clear'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prompt-based text detoxification pipeline"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("--verbose", verbose, "Verbose diagnostics");

  PipelineOptions opt;
  std::vector<std::string> texts;
  std::string file, audit_path, out_path;
  auto* detoxify = app.add_subcommand("detoxify", "Detoxify sentences via ensemble prompting");
  add_pipeline_options(*detoxify, opt);
  detoxify->add_option("--text", texts, "Input sentence (repeatable)");
  detoxify->add_option("--file", file, "File with one input per line");
  detoxify->add_option("--audit", audit_path, "Write all candidates to this JSONL file");
  detoxify->add_option("--out", out_path, "Write winner records to this JSONL file");

  PipelineOptions sel_opt;
  std::string sel_text, sel_strategy = "wmes";
  int sel_k = 3;
  auto* select = app.add_subcommand("select-examples", "Show in-context examples for an input");
  add_pipeline_options(*select, sel_opt);
  select->add_option("--text", sel_text, "Query sentence")->required();
  select->add_option("--strategy", sel_strategy, "random, wmes, or cmes");
  select->add_option("-k,--k", sel_k, "Number of examples");

  PipelineOptions render_opt;
  std::string render_text, render_strategy = "zero";
  int render_k = 3;
  auto* render = app.add_subcommand("render", "Print a rendered prompt");
  render->add_option("--text", render_text, "Input sentence")->required();
  render->add_option("--strategy", render_strategy, "zero, random, wmes, or cmes");
  render->add_option("-k,--k", render_k, "Number of examples");
  add_pipeline_options(*render, render_opt);
  // Few-shot rendering needs the pool; zero-shot does not.
  render->get_option("--train")->required(false);
  render->get_option("--lexicon")->required(false);

  std::string run_config_path;
  auto* run = app.add_subcommand("run", "Execute a full experiment grid from a config file");
  run->add_option("--config", run_config_path, "Run config (JSON)")->required();

  std::string fixtures_sel = "all", fixtures_file;
  std::vector<std::string> run_dirs;
  auto* report = app.add_subcommand("report", "Render comparison tables");
  report->add_option("--fixtures", fixtures_sel, "paradetox, appdia, all, or ''");
  report->add_option("--fixtures-file", fixtures_file, "Fixture JSON path");
  report->add_option("--run", run_dirs, "Run output directory (repeatable)");

  std::string cache_action, cache_dir = ".detox-cache";
  auto* cache = app.add_subcommand("cache", "Inspect or purge the generation cache");
  cache->add_option("action", cache_action, "list or clear")->required();
  cache->add_option("--cache-dir", cache_dir, "Cache directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (detoxify->parsed()) {
      return cmd_detoxify(opt, texts, file, audit_path, out_path);
    }
    if (select->parsed()) {
      return cmd_select_examples(sel_opt, sel_text, sel_strategy, sel_k);
    }
    if (render->parsed()) {
      if (strategy_kind_from_name(render_strategy) != StrategyKind::kZeroShot &&
          (render_opt.train_path.empty() || render_opt.lexicon_path.empty())) {
        throw ConfigError("few-shot rendering requires --train and --lexicon");
      }
      return cmd_render(render_opt, render_text, render_strategy, render_k);
    }
    if (run->parsed()) {
      return cmd_run(run_config_path);
    }
    if (report->parsed()) {
      return cmd_report(fixtures_sel, fixtures_file, run_dirs);
    }
    if (cache->parsed()) {
      return cmd_cache(cache_action, cache_dir);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
