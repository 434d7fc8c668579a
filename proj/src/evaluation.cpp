#include "gptdetox/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "gptdetox/util.hpp"

namespace gptdetox {

CorpusMetrics evaluate_setting(const std::string& setting_id,
                               const std::vector<ScoreTriple>& records,
                               double threshold) {
  if (records.empty()) {
    throw std::runtime_error("evaluate_setting: no records");
  }
  if (threshold <= 0.0 || threshold >= 1.0) {
    throw std::runtime_error("evaluate_setting: threshold must be in (0,1)");
  }
  CorpusMetrics m;
  m.setting_id = setting_id;
  m.n = records.size();
  double sta_hits = 0.0, fl_hits = 0.0, sim_sum = 0.0, j_sum = 0.0;
  for (const auto& t : records) {
    if (t.sta >= threshold) sta_hits += 1.0;
    if (t.fl >= threshold) fl_hits += 1.0;
    sim_sum += t.sim;
    j_sum += j_score(t);
  }
  const double n = static_cast<double>(records.size());
  m.sta = sta_hits / n;
  m.fl = fl_hits / n;
  m.sim = sim_sum / n;
  m.j = m.sta * m.sim * m.fl;
  m.j_mean_per_sentence = j_sum / n;
  return m;
}

std::vector<FixtureRow> load_fixtures(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open fixtures file: " + path.string());
  }
  nlohmann::json doc = nlohmann::json::parse(in);
  std::vector<FixtureRow> rows;
  for (const auto& obj : doc.at("rows")) {
    FixtureRow row;
    row.dataset = obj.at("dataset").get<std::string>();
    row.group = obj.at("group").get<std::string>();
    row.system = obj.at("system").get<std::string>();
    row.sta = obj.at("sta").get<double>();
    row.sim = obj.at("sim").get<double>();
    row.fl = obj.at("fl").get<double>();
    row.j = obj.at("j").get<double>();
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<AuditResult> audit_fixtures(const std::vector<FixtureRow>& rows,
                                        double tolerance) {
  std::vector<AuditResult> results;
  results.reserve(rows.size());
  for (const auto& row : rows) {
    AuditResult r;
    r.row = row;
    r.product = row.sta * row.sim * row.fl;
    r.delta = std::abs(r.product - row.j);
    r.pass = r.delta <= tolerance + 1e-12;
    results.push_back(std::move(r));
  }
  return results;
}

std::string compare_runs(const std::vector<RunRow>& runs,
                         const std::vector<FixtureRow>& fixtures) {
  std::string dataset;
  for (const auto& run : runs) {
    if (dataset.empty()) {
      dataset = run.dataset;
    } else if (run.dataset != dataset) {
      throw std::runtime_error("compare_runs: mismatched datasets (" + dataset +
                               " vs " + run.dataset + ")");
    }
  }

  std::vector<RunRow> ordered = runs;
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    return a.metrics.j > b.metrics.j;
  });

  std::string out;
  out += "| setting | STA | SIM | FL | J |\n";
  out += "|---|---|---|---|---|\n";
  for (const auto& row : fixtures) {
    if (!dataset.empty() && row.dataset != dataset) continue;
    out += "| " + row.system + " (" + row.group + ", reported) | " +
           format2(row.sta) + " | " + format2(row.sim) + " | " +
           format2(row.fl) + " | " + format2(row.j) + " |\n";
  }
  for (const auto& run : ordered) {
    const auto& m = run.metrics;
    out += "| " + run.label + " | " + format2(m.sta) + " | " + format2(m.sim) +
           " | " + format2(m.fl) + " | " + format2(m.j) + " |\n";
  }
  return out;
}

}  // namespace gptdetox
