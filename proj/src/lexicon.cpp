#include "gptdetox/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include "gptdetox/util.hpp"

namespace gptdetox {

namespace {

bool is_token_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '\'' || c >= 0x80;
}

char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_token_char(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t begin = i;
    std::string word;
    while (i < text.size() && is_token_char(static_cast<unsigned char>(text[i]))) {
      word += ascii_lower(text[i]);
      ++i;
    }
    tokens.push_back(Token{std::move(word), begin, i});
  }
  return tokens;
}

std::vector<std::string> normalize(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : tokenize(text)) out.push_back(std::move(t.text));
  return out;
}

ToxicLexicon ToxicLexicon::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open lexicon file: " + path.string());
  }
  std::vector<std::string> raw;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    raw.push_back(line);
  }
  ToxicLexicon lex = from_terms(raw);
  lex.source_path_ = path.string();
  return lex;
}

ToxicLexicon ToxicLexicon::from_terms(const std::vector<std::string>& raw_terms) {
  std::set<std::vector<std::string>> unique;
  for (const auto& raw : raw_terms) {
    auto tokens = normalize(raw);
    if (tokens.empty()) continue;
    unique.insert(std::move(tokens));
  }
  ToxicLexicon lex;
  lex.terms_.assign(unique.begin(), unique.end());
  for (const auto& t : lex.terms_) {
    lex.max_phrase_tokens_ = std::max(lex.max_phrase_tokens_, t.size());
  }
  return lex;
}

bool ToxicLexicon::contains(const std::vector<std::string>& term_tokens) const {
  return std::binary_search(terms_.begin(), terms_.end(), term_tokens);
}

std::uint64_t ToxicLexicon::content_hash() const {
  std::uint64_t h = fnv1a64("toxic-lexicon");
  for (const auto& t : terms_) {
    h = fnv1a64(join(t), h);
    h = fnv1a64("\n", h);
  }
  return h;
}

std::vector<TermMatch> ToxicLexicon::find_toxic_terms(
    std::string_view sentence) const {
  return find_toxic_terms(normalize(sentence));
}

std::vector<TermMatch> ToxicLexicon::find_toxic_terms(
    const std::vector<std::string>& tokens) const {
  std::vector<TermMatch> matches;
  if (terms_.empty() || tokens.empty()) return matches;

  // All matching windows first, then overlap resolution: longest match
  // wins, then leftmost.
  std::vector<TermMatch> candidates;
  std::vector<std::string> window;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::size_t limit = std::min(max_phrase_tokens_, tokens.size() - i);
    for (std::size_t len = 1; len <= limit; ++len) {
      window.assign(tokens.begin() + i, tokens.begin() + i + len);
      if (contains(window)) {
        candidates.push_back(TermMatch{join(window), i, i + len});
      }
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const TermMatch& a, const TermMatch& b) {
                     std::size_t la = a.end - a.begin, lb = b.end - b.begin;
                     if (la != lb) return la > lb;
                     return a.begin < b.begin;
                   });
  std::vector<bool> taken(tokens.size(), false);
  for (const auto& c : candidates) {
    bool overlaps = false;
    for (std::size_t t = c.begin; t < c.end; ++t) overlaps |= taken[t];
    if (overlaps) continue;
    for (std::size_t t = c.begin; t < c.end; ++t) taken[t] = true;
    matches.push_back(c);
  }
  std::sort(matches.begin(), matches.end(),
            [](const TermMatch& a, const TermMatch& b) { return a.begin < b.begin; });
  return matches;
}

}  // namespace gptdetox
