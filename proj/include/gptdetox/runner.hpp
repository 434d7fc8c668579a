#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "gptdetox/ensemble.hpp"
#include "gptdetox/evaluation.hpp"
#include "gptdetox/run_config.hpp"

namespace gptdetox {

struct PipelineBundle {
  std::shared_ptr<EiclPipeline> pipeline;
  std::shared_ptr<CachingBackend> backend;  // same instance the pipeline uses
  Corpus eval_corpus;
};

// Wires corpus, lexicon, index, backends and scorers from a validated config.
PipelineBundle build_pipeline(const RunConfig& config);

struct RunArtifacts {
  std::filesystem::path output_dir;
  std::vector<CorpusMetrics> rows;  // per-setting, then eicl rows
  std::size_t total_records = 0;    // settings x inputs
  std::size_t failed_records = 0;
  bool failure_budget_exceeded = false;
};

// Executes every enabled setting over the evaluation corpus, writes
// per-setting JSONL outputs, a report, and the resolved config.
RunArtifacts execute_run(const RunConfig& config);

}  // namespace gptdetox
