#include "sld/corpus.hpp"

#include <algorithm>
#include <json.hpp>
#include <unordered_map>

#include "sld/text.hpp"

namespace sld::corpus {

namespace {

struct CodePoint {
  char32_t value;
  std::size_t begin;
  std::size_t end;
};

std::vector<CodePoint> decode(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 1;
    if (i + len > s.size()) len = 1;
    char32_t cp = len == 1 ? c : len == 2 ? (c & 0x1F) : len == 3 ? (c & 0x0F) : (c & 0x07);
    for (std::size_t k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    out.push_back({cp, i, i + len});
    i += len;
  }
  return out;
}

bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == U'’'; }

bool is_word_char(char32_t cp) {
  if (cp < 0x80) return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
  if (cp <= 0xBF || cp == 0xD7 || cp == 0xF7) return false;  // Latin-1 punctuation and symbols
  if (cp >= 0x2000 && cp <= 0x206F) return false;               // general punctuation
  if (cp >= 0x3000 && cp <= 0x303F) return false;
  return true;
}

std::string normalize(std::string_view surface) {
  std::string folded = text::fold_case(surface);
  std::string out;
  out.reserve(folded.size());
  for (std::size_t i = 0; i < folded.size(); ++i) {
    if (folded.compare(i, 3, "\xE2\x80\x99") == 0) {
      out.push_back('\'');
      i += 2;
    } else {
      out.push_back(folded[i]);
    }
  }
  return out;
}

struct Span {
  std::size_t begin;
  std::size_t end;
};

std::vector<Span> word_spans(std::string_view text) {
  auto cps = decode(text);
  std::vector<Span> spans;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (!is_word_char(cps[i].value)) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    for (;;) {
      if (j < cps.size() && is_word_char(cps[j].value)) {
        ++j;
      } else if (j + 1 < cps.size() && (is_apostrophe(cps[j].value) || cps[j].value == U'-') &&
                 is_word_char(cps[j + 1].value)) {
        j += 2;  // joiner between two word characters
      } else {
        break;
      }
    }
    spans.push_back({cps[i].begin, cps[j - 1].end});
    i = j;
  }
  return spans;
}

}  // namespace

Lexicon Lexicon::from_store(const store::Store& store) {
  Lexicon lex;
  for (const auto& e : store.entries()) lex.add(e.lemma);
  return lex;
}

void Lexicon::add(std::string_view lemma) {
  auto words = tokenize(lemma);
  if (words.size() < 2) return;
  std::string joined;
  for (const auto& w : words) {
    if (!joined.empty()) joined.push_back('_');
    joined += w.normalized;
  }
  max_words_ = std::max(max_words_, words.size());
  multiword_.insert(std::move(joined));
}

std::vector<Token> tokenize(std::string_view text, const Lexicon* lexicon) {
  auto spans = word_spans(text);
  std::vector<Token> words;
  words.reserve(spans.size());
  for (auto s : spans) {
    auto surface = text.substr(s.begin, s.end - s.begin);
    words.push_back({std::string(surface), normalize(surface)});
  }
  if (!lexicon || lexicon->max_words() < 2) return words;

  std::vector<Token> out;
  out.reserve(words.size());
  std::size_t i = 0;
  while (i < words.size()) {
    std::size_t matched = 1;
    for (std::size_t n = std::min(lexicon->max_words(), words.size() - i); n >= 2; --n) {
      std::string joined = words[i].normalized;
      for (std::size_t k = 1; k < n; ++k) joined += "_" + words[i + k].normalized;
      if (lexicon->contains(joined)) {
        out.push_back({std::string(text.substr(spans[i].begin, spans[i + n - 1].end - spans[i].begin)), joined});
        matched = n;
        break;
      }
    }
    if (matched == 1) out.push_back(std::move(words[i]));
    i += matched;
  }
  return out;
}

CandidateReport classify(const std::vector<Token>& tokens, const store::Store& store, std::string source_name) {
  CandidateReport report;
  report.source_name = std::move(source_name);
  std::unordered_map<std::string, std::size_t> known_at, unknown_at;
  for (const auto& t : tokens) {
    if (t.normalized.empty()) continue;
    if (known_at.contains(t.normalized)) continue;
    if (auto it = unknown_at.find(t.normalized); it != unknown_at.end()) {
      ++report.unknown[it->second].second;
      continue;
    }
    auto matches = store.find_by_lemma(t.normalized);
    if (!matches.empty()) {
      known_at.emplace(t.normalized, report.known.size());
      report.known.emplace_back(t.normalized, matches.front()->id);
    } else {
      unknown_at.emplace(t.normalized, report.unknown.size());
      report.unknown.emplace_back(t.normalized, 1);
    }
  }
  return report;
}

std::vector<store::Candidate> propose_candidates(const CandidateReport& report) {
  std::vector<store::Candidate> out;
  out.reserve(report.unknown.size());
  for (const auto& [token, count] : report.unknown) {
    store::Candidate c{token, count, {}};
    if (!report.source_name.empty()) c.sources.push_back(report.source_name);
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const store::Candidate& a, const store::Candidate& b) {
    return a.count != b.count ? a.count > b.count : a.lemma < b.lemma;
  });
  return out;
}

std::string report_to_jsonl(const CandidateReport& report) {
  using json = nlohmann::json;
  std::string out;
  for (const auto& [token, id] : report.known) {
    out += json{{"source", report.source_name}, {"known", token}, {"entry_id", id}}.dump() + "\n";
  }
  for (const auto& [token, count] : report.unknown) {
    out += json{{"source", report.source_name}, {"unknown", token}, {"count", count}}.dump() + "\n";
  }
  return out;
}

}  // namespace sld::corpus
