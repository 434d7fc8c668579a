#include "gptdetox/runner.hpp"

#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "gptdetox/util.hpp"

namespace gptdetox {

namespace {

using ordered_json = nlohmann::ordered_json;

Corpus load_dataset(const DatasetConfig& d) {
  Corpus corpus = load_corpus(d.path, corpus_format_from_name(d.format), d.header);
  if (d.split != "unsplit") {
    corpus = split_view(corpus, d.split, d.ratios, d.split_seed);
  }
  return corpus;
}

std::shared_ptr<EmbeddingProvider> make_provider(const EmbeddingConfig& e) {
  if (e.kind == "deterministic-test") {
    return std::make_shared<HashedBagProvider>(e.dim);
  }
  RemoteEmbeddingConfig remote;
  remote.endpoint = e.endpoint;
  remote.model = e.model;
  remote.api_key_env = e.api_key_env;
  return std::make_shared<RemoteEmbeddingProvider>(remote);
}

ordered_json metrics_json(const CorpusMetrics& m) {
  return ordered_json{{"setting", m.setting_id},
                      {"sta", m.sta},
                      {"sim", m.sim},
                      {"fl", m.fl},
                      {"j", m.j},
                      {"j_mean_per_sentence", m.j_mean_per_sentence},
                      {"n", m.n}};
}

}  // namespace

PipelineBundle build_pipeline(const RunConfig& config) {
  config.validate();

  auto lexicon = ToxicLexicon::from_file(config.lexicon_path);
  Corpus train = load_dataset(config.train_dataset);
  Corpus eval = load_dataset(config.dataset);

  auto provider = make_provider(config.embedding);

  std::filesystem::path cache_dir = config.cache_dir;
  bool needs_index = false;
  for (const auto& s : config.strategies) needs_index |= (s == "cmes");
  EmbeddingIndex index;
  if (needs_index) {
    index = load_or_build_index(train, *provider, cache_dir / "embeddings");
  }

  std::shared_ptr<GenerationBackend> raw_backend;
  if (config.generation.backend == "mock") {
    raw_backend = std::make_shared<MockBackend>(lexicon);
  } else {
    RemoteChatConfig remote;
    remote.endpoint = config.generation.endpoint;
    remote.api_key_env = config.generation.api_key_env;
    remote.max_attempts = config.generation.max_attempts;
    raw_backend = std::make_shared<RemoteChatBackend>(remote);
  }
  auto backend = std::make_shared<CachingBackend>(cache_dir / "generations",
                                                  std::move(raw_backend));

  ScorerSet scorers;
  scorers.sta = config.scorers.sta == "remote-classifier"
                    ? std::shared_ptr<StaScorer>(
                          std::make_shared<RemoteClassifierScorer>(RemoteScorerConfig{
                              config.scorers.sta_endpoint, config.scorers.sta_path}))
                    : std::make_shared<HeuristicStaScorer>(lexicon);
  scorers.sim = std::make_shared<EmbeddingSimScorer>(provider);
  if (config.scorers.fl == "remote-classifier") {
    auto remote = std::make_shared<RemoteClassifierScorer>(RemoteScorerConfig{
        config.scorers.fl_endpoint, config.scorers.fl_path});
    scorers.fl = std::shared_ptr<FlScorer>(remote, static_cast<FlScorer*>(remote.get()));
  } else {
    scorers.fl = std::make_shared<HeuristicFlScorer>();
  }

  EnsembleConfig ensemble;
  ensemble.grid.zero_shot = config.zero_shot;
  ensemble.grid.few_shot_kinds.clear();
  for (const auto& s : config.strategies) {
    ensemble.grid.few_shot_kinds.push_back(strategy_kind_from_name(s));
  }
  ensemble.grid.ks = config.ks;
  ensemble.grid.seed = config.seed;
  ensemble.scoring_fn = scoring_function_from_name(config.scoring);
  ensemble.model = config.generation.model;
  ensemble.temperature = config.generation.temperature;
  ensemble.max_tokens = config.generation.max_tokens;
  ensemble.concurrency = config.generation.concurrency;

  PipelineBundle bundle;
  bundle.pipeline = std::make_shared<EiclPipeline>(
      std::move(train), std::move(lexicon), std::move(index), provider, backend,
      std::move(scorers), std::move(ensemble));
  bundle.backend = backend;
  bundle.eval_corpus = std::move(eval);
  return bundle;
}

RunArtifacts execute_run(const RunConfig& config) {
  auto bundle = build_pipeline(config);
  const auto& pipeline = *bundle.pipeline;
  const Corpus& eval = bundle.eval_corpus;
  if (eval.empty()) {
    throw std::runtime_error("evaluation corpus is empty: " + config.dataset.path);
  }

  RunArtifacts artifacts;
  artifacts.output_dir = config.output_dir;
  std::filesystem::create_directories(artifacts.output_dir / "outputs");

  auto settings = enumerate_prompt_settings(pipeline.config().grid);
  artifacts.total_records = settings.size() * eval.size();

  // candidates[i] collects each setting's scored output for input i, in
  // enumeration order, so the eicl rows reuse the same generations.
  std::vector<std::vector<Candidate>> candidates(eval.size());

  for (const auto& setting : settings) {
    std::vector<OutputRecord> records;
    std::vector<ScoreTriple> triples;
    for (std::size_t i = 0; i < eval.size(); ++i) {
      const auto& pair = eval.pairs[i];
      Candidate candidate;
      try {
        candidate = pipeline.run_setting(pair.toxic, setting);
      } catch (const std::exception& e) {
        ++artifacts.failed_records;
        std::cerr << "warning: " << setting.setting_id() << " failed for id "
                  << pair.id << ": " << e.what() << '\n';
        continue;
      }
      OutputRecord record;
      record.id = pair.id;
      record.input = pair.toxic;
      record.output = candidate.output;
      record.prompt_setting = candidate.setting_id;
      record.sta = candidate.scores.sta;
      record.sim = candidate.scores.sim;
      record.fl = candidate.scores.fl;
      record.s = s_score(candidate.scores);
      record.j = j_score(candidate.scores);
      record.refusal = candidate.flags.refusal;
      records.push_back(std::move(record));
      triples.push_back(candidate.scores);
      candidates[i].push_back(std::move(candidate));
    }
    save_outputs(records,
                 artifacts.output_dir / "outputs" / (setting.setting_id() + ".jsonl"));
    if (!triples.empty()) {
      artifacts.rows.push_back(
          evaluate_setting(setting.setting_id(), triples, config.threshold));
    }
  }

  if (config.eicl) {
    for (ScoringFunction fn :
         {ScoringFunction::kSScore, ScoringFunction::kJScore}) {
      std::string setting_id =
          fn == ScoringFunction::kSScore ? "eicl-s" : "eicl-j";
      std::vector<OutputRecord> records;
      std::vector<ScoreTriple> triples;
      for (std::size_t i = 0; i < eval.size(); ++i) {
        if (candidates[i].empty()) continue;
        const Candidate& best = candidates[i][eicl_select(candidates[i], fn)];
        OutputRecord record;
        record.id = eval.pairs[i].id;
        record.input = eval.pairs[i].toxic;
        record.output = best.output;
        record.prompt_setting = setting_id + ":" + best.setting_id;
        record.sta = best.scores.sta;
        record.sim = best.scores.sim;
        record.fl = best.scores.fl;
        record.s = s_score(best.scores);
        record.j = j_score(best.scores);
        record.refusal = best.flags.refusal;
        records.push_back(std::move(record));
        triples.push_back(best.scores);
      }
      save_outputs(records,
                   artifacts.output_dir / "outputs" / (setting_id + ".jsonl"));
      if (!triples.empty()) {
        artifacts.rows.push_back(
            evaluate_setting(setting_id, triples, config.threshold));
      }
    }
  }

  // Report: machine-readable rows plus run metadata sufficient to replay the
  // run against the same backends and cache. No wall-clock fields; reruns
  // must be byte-identical.
  ordered_json report;
  report["metadata"] = ordered_json{
      {"dataset", config.dataset.path},
      {"model", config.generation.model},
      {"temperature", config.generation.temperature},
      {"max_tokens", config.generation.max_tokens},
      {"backend", config.generation.backend},
      {"lexicon_hash", to_hex(pipeline.lexicon().content_hash())},
      {"embedding_provider", config.embedding.kind},
      {"scoring", config.scoring},
      {"threshold", config.threshold},
      {"seed", config.seed},
      {"n_inputs", eval.size()},
      {"failed_records", artifacts.failed_records},
  };
  report["rows"] = ordered_json::array();
  for (const auto& row : artifacts.rows) report["rows"].push_back(metrics_json(row));
  {
    std::ofstream out(artifacts.output_dir / "report.json");
    out << report.dump(2) << '\n';
  }
  {
    std::vector<RunRow> run_rows;
    for (const auto& row : artifacts.rows) {
      run_rows.push_back(RunRow{"run", row.setting_id, row});
    }
    std::ofstream out(artifacts.output_dir / "report.md");
    out << compare_runs(run_rows, {});
  }
  {
    std::ofstream out(artifacts.output_dir / "resolved_config.json");
    out << config.resolved_json() << '\n';
  }

  double failure_fraction =
      artifacts.total_records == 0
          ? 0.0
          : static_cast<double>(artifacts.failed_records) /
                static_cast<double>(artifacts.total_records);
  artifacts.failure_budget_exceeded =
      failure_fraction > config.max_failure_fraction;
  return artifacts;
}

}  // namespace gptdetox
