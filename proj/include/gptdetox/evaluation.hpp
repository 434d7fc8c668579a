#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gptdetox/scoring.hpp"

namespace gptdetox {

struct CorpusMetrics {
  std::string setting_id;
  double sta = 0.0;  // fraction of records with sta >= threshold
  double sim = 0.0;  // mean per-sentence sim
  double fl = 0.0;   // fraction of records with fl >= threshold
  double j = 0.0;    // sta * sim * fl over the aggregates
  double j_mean_per_sentence = 0.0;
  std::size_t n = 0;
};

CorpusMetrics evaluate_setting(const std::string& setting_id,
                               const std::vector<ScoreTriple>& records,
                               double threshold = 0.5);

// One transcribed row of the published result tables.
struct FixtureRow {
  std::string dataset;  // "paradetox" | "appdia"
  std::string group;    // "human", "unsupervised", "supervised", "baseline",
                        // "gpt-detox", "eicl"
  std::string system;
  double sta = 0.0;
  double sim = 0.0;
  double fl = 0.0;
  double j = 0.0;
};

std::vector<FixtureRow> load_fixtures(const std::filesystem::path& path);

struct AuditResult {
  FixtureRow row;
  double product = 0.0;  // sta * sim * fl
  double delta = 0.0;    // |product - reported j|
  bool pass = false;
};

// Checks |STA*SIM*FL - reported J| <= tolerance for every row.
std::vector<AuditResult> audit_fixtures(const std::vector<FixtureRow>& rows,
                                        double tolerance = 0.02);

struct RunRow {
  std::string dataset;
  std::string label;
  CorpusMetrics metrics;
};

// Markdown table with 2-decimal rendering; fixture rows for the same
// dataset are interleaved for side-by-side comparison. Throws when runs
// mix datasets.
std::string compare_runs(const std::vector<RunRow>& runs,
                         const std::vector<FixtureRow>& fixtures);

}  // namespace gptdetox
