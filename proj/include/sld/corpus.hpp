#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "sld/store.hpp"

namespace sld::corpus {

struct Token {
  std::string surface;     // as written in the text
  std::string normalized;  // case-folded; multiword matches joined with '_'

  bool operator==(const Token&) const = default;
};

/// Underscore lemmas with two or more words, used to join multiword expressions.
class Lexicon {
 public:
  Lexicon() = default;
  static Lexicon from_store(const store::Store& store);

  void add(std::string_view lemma);
  bool contains(std::string_view joined) const { return multiword_.contains(std::string(joined)); }
  std::size_t max_words() const { return max_words_; }

 private:
  std::unordered_set<std::string> multiword_;
  std::size_t max_words_ = 1;
};

/// Splits on whitespace and punctuation (and '_'); apostrophes and hyphens survive inside words.
/// With a lexicon, the longest run of words forming a known multiword lemma becomes one token.
std::vector<Token> tokenize(std::string_view text, const Lexicon* lexicon = nullptr);

struct CandidateReport {
  std::string source_name;
  std::vector<std::pair<std::string, std::string>> known;     // (token, entry id), first occurrence order
  std::vector<std::pair<std::string, std::uint32_t>> unknown;  // (token, occurrences)
};

/// A token is known iff it equals some entry lemma (any POS, case-insensitive).
CandidateReport classify(const std::vector<Token>& tokens, const store::Store& store, std::string source_name = {});

/// One task per unknown token, by descending count then alphabetically.
std::vector<store::Candidate> propose_candidates(const CandidateReport& report);

/// Line-delimited JSON: one {"known": ...} or {"unknown": ...} record per line.
std::string report_to_jsonl(const CandidateReport& report);

}  // namespace sld::corpus
