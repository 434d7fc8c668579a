#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gptdetox {

// One token of the normalized stream, with the byte range it occupied in the
// original text.
struct Token {
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Lowercases ASCII letters; tokens are maximal runs of letters, digits and
// apostrophes. Bytes >= 0x80 are treated as letters so UTF-8 words survive
// intact. Everything else separates tokens.
std::vector<Token> tokenize(std::string_view text);
std::vector<std::string> normalize(std::string_view text);

// A lexicon term matched against a token index range [begin, end).
struct TermMatch {
  std::string term;  // normalized, space-joined
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const TermMatch&) const = default;
};

/// Toxic word/phrase list with whole-token matching. Immutable after load.
class ToxicLexicon {
 public:
  ToxicLexicon() = default;

  // One term per line, '#' comments and blank lines ignored.
  static ToxicLexicon from_file(const std::filesystem::path& path);
  static ToxicLexicon from_terms(const std::vector<std::string>& raw_terms);

  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  std::size_t max_phrase_tokens() const { return max_phrase_tokens_; }
  const std::vector<std::vector<std::string>>& terms() const { return terms_; }
  const std::string& source_path() const { return source_path_; }

  bool contains(const std::vector<std::string>& term_tokens) const;
  std::uint64_t content_hash() const;

  // Every term occurring as a contiguous whole-token subsequence, scanned
  // left to right; on overlap the longest match wins, then the leftmost.
  // Matched spans do not overlap.
  std::vector<TermMatch> find_toxic_terms(std::string_view sentence) const;
  std::vector<TermMatch> find_toxic_terms(
      const std::vector<std::string>& tokens) const;

 private:
  std::vector<std::vector<std::string>> terms_;  // sorted, deduplicated
  std::size_t max_phrase_tokens_ = 0;
  std::string source_path_;
};

}  // namespace gptdetox
