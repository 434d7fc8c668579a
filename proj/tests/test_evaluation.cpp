#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "gptdetox/evaluation.hpp"
#include "test_helpers.hpp"

using namespace gptdetox;

namespace {

std::vector<ScoreTriple> sample_records() {
  return {
      {1.0, 0.90, 1.0},
      {1.0, 0.80, 1.0},
      {0.0, 0.70, 1.0},
      {1.0, 0.60, 0.0},
  };
}

}  // namespace

TEST_CASE("evaluate_setting aggregates threshold fractions and mean sim") {
  auto m = evaluate_setting("wmes-k3", sample_records());
  CHECK(m.setting_id == "wmes-k3");
  CHECK(m.n == 4);
  CHECK(m.sta == doctest::Approx(0.75));
  CHECK(m.fl == doctest::Approx(0.75));
  CHECK(m.sim == doctest::Approx(0.75));
  CHECK(m.j == doctest::Approx(0.75 * 0.75 * 0.75));
  // Per-sentence j values: 0.9, 0.8, 0, 0.
  CHECK(m.j_mean_per_sentence == doctest::Approx(0.425));
}

TEST_CASE("evaluate_setting validates arguments") {
  CHECK_THROWS(evaluate_setting("zero", {}));
  CHECK_THROWS(evaluate_setting("zero", sample_records(), 0.0));
  CHECK_THROWS(evaluate_setting("zero", sample_records(), 1.0));
}

TEST_CASE("evaluate_setting is permutation invariant") {
  std::mt19937_64 gen(61);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ScoreTriple> records;
  for (int i = 0; i < 25; ++i) records.push_back({unit(gen), unit(gen), unit(gen)});
  auto base = evaluate_setting("x", records);
  for (int trial = 0; trial < 10; ++trial) {
    for (std::size_t i = records.size(); i > 1; --i) {
      std::swap(records[i - 1], records[gen() % i]);
    }
    auto shuffled = evaluate_setting("x", records);
    CHECK(shuffled.sta == doctest::Approx(base.sta));
    CHECK(shuffled.sim == doctest::Approx(base.sim));
    CHECK(shuffled.fl == doctest::Approx(base.fl));
    CHECK(shuffled.j == doctest::Approx(base.j));
    CHECK(shuffled.j_mean_per_sentence == doctest::Approx(base.j_mean_per_sentence));
  }
}

TEST_CASE("raising the threshold never raises sta or fl") {
  std::mt19937_64 gen(67);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ScoreTriple> records;
  for (int i = 0; i < 40; ++i) records.push_back({unit(gen), unit(gen), unit(gen)});
  double prev_sta = 1.0, prev_fl = 1.0;
  for (double threshold : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    auto m = evaluate_setting("x", records, threshold);
    CHECK(m.sta <= prev_sta);
    CHECK(m.fl <= prev_fl);
    prev_sta = m.sta;
    prev_fl = m.fl;
  }
}

TEST_CASE("bundled fixtures load with the expected shape") {
  auto rows = load_fixtures(testutil::data_dir() / "fixtures" / "paper_tables.json");
  CHECK(rows.size() >= 26);
  std::size_t paradetox = 0, appdia = 0;
  std::set<std::string> groups;
  for (const auto& row : rows) {
    if (row.dataset == "paradetox") ++paradetox;
    if (row.dataset == "appdia") ++appdia;
    groups.insert(row.group);
    CHECK(row.sta >= 0.0);
    CHECK(row.sta <= 1.0);
    CHECK(row.sim >= 0.0);
    CHECK(row.sim <= 1.0);
    CHECK(row.fl >= 0.0);
    CHECK(row.fl <= 1.0);
  }
  CHECK(paradetox >= 14);
  CHECK(appdia >= 8);
  CHECK(groups.count("gpt-detox") == 1);
  CHECK(groups.count("eicl") == 1);
  CHECK(groups.count("human") == 1);
}

TEST_CASE("audit arithmetic on constructed rows") {
  std::vector<FixtureRow> rows = {
      {"paradetox", "x", "exact", 0.90, 0.80, 0.50, 0.36},
      {"paradetox", "x", "off-by-0.05", 0.90, 0.80, 0.50, 0.41},
  };
  auto results = audit_fixtures(rows, 0.02);
  REQUIRE(results.size() == 2);
  CHECK(results[0].pass);
  CHECK(results[0].product == doctest::Approx(0.36));
  CHECK(results[0].delta == doctest::Approx(0.0));
  CHECK(!results[1].pass);
  CHECK(results[1].delta == doctest::Approx(0.05));
  CHECK(audit_fixtures(rows, 0.06)[1].pass);
}

TEST_CASE("bundled fixture audit flags exactly the known outliers") {
  // Three published baseline rows report a sentence-averaged joint score
  // that sits more than 0.02 from the product of their aggregate columns.
  // Our own pipeline rows must all satisfy the identity.
  auto rows = load_fixtures(testutil::data_dir() / "fixtures" / "paper_tables.json");
  auto results = audit_fixtures(rows, 0.02);
  std::set<std::string> failing;
  for (const auto& r : results) {
    if (!r.pass) failing.insert(r.row.system);
    if (r.row.group == "gpt-detox" || r.row.group == "eicl" ||
        r.row.group == "human") {
      CHECK(r.pass);
    }
  }
  CHECK(failing == std::set<std::string>{"DLSM", "DialoGPT", "DiffuDetox"});
}

TEST_CASE("compare_runs renders sorted rows against fixture rows") {
  std::vector<RunRow> runs = {
      {"paradetox", "mine-low", CorpusMetrics{"zero", 0.5, 0.5, 0.5, 0.125, 0.1, 10}},
      {"paradetox", "mine-high", CorpusMetrics{"wmes-k5", 0.9, 0.9, 0.9, 0.729, 0.7, 10}},
  };
  std::vector<FixtureRow> fixtures = {
      {"paradetox", "human", "Human", 0.96, 0.77, 0.88, 0.66},
      {"appdia", "human", "Human", 0.97, 0.85, 0.89, 0.74},
  };
  auto table = compare_runs(runs, fixtures);
  CHECK(table.find("| setting | STA | SIM | FL | J |") == 0);
  CHECK(table.find("Human (human, reported) | 0.96 | 0.77 | 0.88 | 0.66") !=
        std::string::npos);
  // The other-dataset fixture row is excluded.
  CHECK(table.find("0.85") == std::string::npos);
  // Run rows come out in descending J order.
  CHECK(table.find("mine-high") < table.find("mine-low"));
  CHECK(table.find("| mine-high | 0.90 | 0.90 | 0.90 | 0.73 |") != std::string::npos);
}

TEST_CASE("compare_runs rejects mixed datasets") {
  std::vector<RunRow> runs = {
      {"paradetox", "a", CorpusMetrics{}},
      {"appdia", "b", CorpusMetrics{}},
  };
  CHECK_THROWS(compare_runs(runs, {}));
}
