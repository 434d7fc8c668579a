#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gptdetox {

struct SentencePair {
  std::string id;
  std::string toxic;
  std::string neutral;  // may be empty for inference-only inputs
  std::string source;

  bool operator==(const SentencePair&) const = default;
};

enum class CorpusFormat { kTsv, kJsonl };

CorpusFormat corpus_format_from_name(std::string_view name);

struct Corpus {
  std::vector<SentencePair> pairs;
  std::string split = "unsplit";

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
  std::uint64_t content_hash() const;
  // Non-fatal findings (e.g. duplicate toxic sentences across records).
  std::vector<std::string> validation_report() const;
};

// TSV: toxic<TAB>neutral[<TAB>id]; JSONL: {"toxic", "neutral", "id", "source"}.
// Ids default to the zero-based record index rendered as text.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   bool skip_header = false);

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

// Deterministic seeded partition; split is one of train/validation/test.
Corpus split_view(const Corpus& corpus, std::string_view split,
                  const SplitRatios& ratios, std::uint64_t seed);

struct OutputRecord {
  std::string id;
  std::string input;
  std::string output;
  std::string prompt_setting;
  double sta = 0.0;
  double sim = 0.0;
  double fl = 0.0;
  double s = 0.0;
  double j = 0.0;
  bool refusal = false;

  bool operator==(const OutputRecord&) const = default;
};

void save_outputs(const std::vector<OutputRecord>& records,
                  const std::filesystem::path& path);
std::vector<OutputRecord> load_outputs(const std::filesystem::path& path);

}  // namespace gptdetox
