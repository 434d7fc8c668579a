#include "gptdetox/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "gptdetox/util.hpp"

namespace gptdetox {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cols.emplace_back(line.substr(start));
      break;
    }
    cols.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

void check_pair(const SentencePair& pair, std::size_t line_no,
                std::unordered_set<std::string>& seen_ids) {
  if (trim(pair.toxic).empty()) {
    throw std::runtime_error("line " + std::to_string(line_no) +
                             ": toxic text is empty");
  }
  if (!seen_ids.insert(pair.id).second) {
    throw std::runtime_error("line " + std::to_string(line_no) +
                             ": duplicate id '" + pair.id + "'");
  }
}

}  // namespace

CorpusFormat corpus_format_from_name(std::string_view name) {
  if (name == "tsv") return CorpusFormat::kTsv;
  if (name == "jsonl") return CorpusFormat::kJsonl;
  throw std::runtime_error("unknown corpus format: " + std::string(name));
}

std::uint64_t Corpus::content_hash() const {
  std::uint64_t h = fnv1a64("corpus");
  for (const auto& p : pairs) {
    h = fnv1a64(p.id, h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(p.toxic, h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(p.neutral, h);
    h = fnv1a64("\x1e", h);
  }
  return h;
}

std::vector<std::string> Corpus::validation_report() const {
  std::vector<std::string> notes;
  std::unordered_map<std::string, std::size_t> toxic_counts;
  for (const auto& p : pairs) ++toxic_counts[p.toxic];
  for (const auto& p : pairs) {
    auto it = toxic_counts.find(p.toxic);
    if (it != toxic_counts.end() && it->second > 1) {
      notes.push_back("toxic sentence appears " + std::to_string(it->second) +
                      " times (first id " + p.id + "): " + p.toxic);
      toxic_counts.erase(it);
    }
  }
  return notes;
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   bool skip_header) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open corpus file: " + path.string());
  }
  Corpus corpus;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  std::size_t record_index = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && skip_header) continue;
    if (format == CorpusFormat::kTsv) {
      if (line.empty()) continue;
      auto cols = split_tabs(line);
      if (cols.size() < 2 || cols.size() > 3) {
        throw std::runtime_error("line " + std::to_string(line_no) +
                                 ": expected 2 or 3 tab-separated columns, got " +
                                 std::to_string(cols.size()));
      }
      SentencePair pair;
      pair.toxic = cols[0];
      pair.neutral = cols[1];
      pair.id = cols.size() == 3 ? cols[2] : std::to_string(record_index);
      pair.source = "tsv";
      check_pair(pair, line_no, seen_ids);
      corpus.pairs.push_back(std::move(pair));
    } else {
      if (trim(line).empty()) continue;
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("line " + std::to_string(line_no) +
                                 ": malformed JSON record: " + e.what());
      }
      if (!obj.is_object() || !obj.contains("toxic")) {
        throw std::runtime_error("line " + std::to_string(line_no) +
                                 ": record must be an object with a 'toxic' field");
      }
      SentencePair pair;
      pair.toxic = obj.at("toxic").get<std::string>();
      pair.neutral = obj.value("neutral", std::string{});
      pair.id = obj.contains("id") && obj.at("id").is_string()
                    ? obj.at("id").get<std::string>()
                    : std::to_string(record_index);
      pair.source = obj.value("source", std::string{"jsonl"});
      check_pair(pair, line_no, seen_ids);
      corpus.pairs.push_back(std::move(pair));
    }
    ++record_index;
  }
  return corpus;
}

Corpus split_view(const Corpus& corpus, std::string_view split,
                  const SplitRatios& ratios, std::uint64_t seed) {
  if (split != "train" && split != "validation" && split != "test" &&
      split != "unsplit") {
    throw std::runtime_error("unknown split name: " + std::string(split));
  }
  if (split == "unsplit") {
    Corpus out = corpus;
    out.split = "unsplit";
    return out;
  }
  double total = ratios.train + ratios.validation + ratios.test;
  if (total <= 0.0 || std::abs(total - 1.0) > 1e-9) {
    throw std::runtime_error("split ratios must sum to 1");
  }
  const std::size_t n = corpus.size();
  std::vector<std::size_t> indices(n);
  for (std::size_t i = 0; i < n; ++i) indices[i] = i;
  // Hand-rolled Fisher-Yates: std::shuffle is implementation-defined, and
  // partitions must be reproducible across platforms.
  std::mt19937_64 gen(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(gen() % i);
    std::swap(indices[i - 1], indices[j]);
  }
  auto count_for = [n](double ratio) {
    return static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
  };
  std::size_t n_train = std::min(count_for(ratios.train), n);
  std::size_t n_val = std::min(count_for(ratios.validation), n - n_train);
  std::size_t begin = 0, end = 0;
  if (split == "train") {
    begin = 0;
    end = n_train;
  } else if (split == "validation") {
    begin = n_train;
    end = n_train + n_val;
  } else {
    begin = n_train + n_val;
    end = n;
  }
  std::vector<std::size_t> chosen(indices.begin() + static_cast<std::ptrdiff_t>(begin),
                                  indices.begin() + static_cast<std::ptrdiff_t>(end));
  std::sort(chosen.begin(), chosen.end());  // keep corpus order within a split
  Corpus out;
  out.split = std::string(split);
  out.pairs.reserve(chosen.size());
  for (std::size_t idx : chosen) out.pairs.push_back(corpus.pairs[idx]);
  return out;
}

void save_outputs(const std::vector<OutputRecord>& records,
                  const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write outputs to: " + path.string());
  }
  for (const auto& r : records) {
    ordered_json obj;
    obj["id"] = r.id;
    obj["input"] = r.input;
    obj["output"] = r.output;
    obj["prompt_setting"] = r.prompt_setting;
    obj["sta"] = r.sta;
    obj["sim"] = r.sim;
    obj["fl"] = r.fl;
    obj["s"] = r.s;
    obj["j"] = r.j;
    obj["refusal"] = r.refusal;
    out << obj.dump() << '\n';
  }
  if (!out) {
    throw std::runtime_error("I/O failure while writing: " + path.string());
  }
}

std::vector<OutputRecord> load_outputs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open outputs file: " + path.string());
  }
  std::vector<OutputRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": malformed output record: " + e.what());
    }
    OutputRecord r;
    r.id = obj.at("id").get<std::string>();
    r.input = obj.at("input").get<std::string>();
    r.output = obj.at("output").get<std::string>();
    r.prompt_setting = obj.at("prompt_setting").get<std::string>();
    r.sta = obj.at("sta").get<double>();
    r.sim = obj.at("sim").get<double>();
    r.fl = obj.at("fl").get<double>();
    r.s = obj.at("s").get<double>();
    r.j = obj.at("j").get<double>();
    r.refusal = obj.value("refusal", false);
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace gptdetox
