#include "sld/wordnet.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace sld::wn {

char pos_tag(PartOfSpeech pos) noexcept {
  switch (pos) {
    case PartOfSpeech::Noun: return 'n';
    case PartOfSpeech::Verb: return 'v';
    case PartOfSpeech::Adjective: return 'a';
    case PartOfSpeech::AdjectiveSatellite: return 's';
    case PartOfSpeech::Adverb: return 'r';
  }
  return '?';
}

std::optional<PartOfSpeech> pos_from_tag(char tag) noexcept {
  switch (tag) {
    case 'n': return PartOfSpeech::Noun;
    case 'v': return PartOfSpeech::Verb;
    case 'a': return PartOfSpeech::Adjective;
    case 's': return PartOfSpeech::AdjectiveSatellite;
    case 'r': return PartOfSpeech::Adverb;
    default: return std::nullopt;
  }
}

PartOfSpeech file_pos(PartOfSpeech pos) noexcept {
  return pos == PartOfSpeech::AdjectiveSatellite ? PartOfSpeech::Adjective : pos;
}

std::size_t file_index(PartOfSpeech pos) noexcept {
  switch (file_pos(pos)) {
    case PartOfSpeech::Noun: return 0;
    case PartOfSpeech::Verb: return 1;
    case PartOfSpeech::Adjective: return 2;
    default: return 3;
  }
}

std::string_view file_suffix(PartOfSpeech pos) noexcept {
  static constexpr std::array<std::string_view, 4> names = {"noun", "verb", "adj", "adv"};
  return names[file_index(pos)];
}

std::optional<PartOfSpeech> pos_from_name(std::string_view name) noexcept {
  if (name == "noun" || name == "n") return PartOfSpeech::Noun;
  if (name == "verb" || name == "v") return PartOfSpeech::Verb;
  if (name == "adj" || name == "adjective" || name == "a") return PartOfSpeech::Adjective;
  if (name == "adv" || name == "adverb" || name == "r") return PartOfSpeech::Adverb;
  return std::nullopt;
}

std::string format_offset(std::uint32_t offset) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08u", offset);
  return buf;
}

namespace {

struct Token {
  std::string_view text;
  std::size_t column;
};

[[noreturn]] void malformed(std::string_view what, std::size_t column) {
  throw ParseError(Errc::MalformedLine, std::string(what) + " at byte " + std::to_string(column),
                   column);
}

[[noreturn]] void count_mismatch(std::string_view what, std::size_t column) {
  throw ParseError(Errc::CountMismatch, std::string(what) + " at byte " + std::to_string(column),
                   column);
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_lower_hex(char c) { return is_digit(c) || (c >= 'a' && c <= 'f'); }

// Fixed-width numeric field; width 0 accepts any length.
std::optional<std::uint32_t> fixed_number(std::string_view s, std::size_t width, int base) {
  if (s.empty() || (width != 0 && s.size() != width)) return std::nullopt;
  for (char c : s) {
    if (base == 10 ? !is_digit(c) : !is_lower_hex(c)) return std::nullopt;
  }
  std::uint32_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value, base);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::uint32_t expect_number(const Token& t, std::size_t width, int base, std::string_view field) {
  auto v = fixed_number(t.text, width, base);
  if (!v) malformed("bad " + std::string(field) + " '" + std::string(t.text) + "'", t.column);
  return *v;
}

// Tokens are separated by exactly one space; anything else would not re-serialize.
std::vector<Token> split_fields(std::string_view head) {
  std::vector<Token> out;
  if (head.empty() || head.back() == ' ') malformed("empty field", head.size());
  std::size_t start = 0;
  while (start < head.size()) {
    auto end = head.find(' ', start);
    if (end == std::string_view::npos) end = head.size();
    if (end == start) malformed("empty field", start);
    out.push_back({head.substr(start, end - start), start});
    start = end + 1;
  }
  return out;
}

bool pos_compatible(PartOfSpeech ss_type, PartOfSpeech file) {
  return file_pos(ss_type) == file_pos(file);
}

void append_hex2(std::string& out, unsigned v) {
  static constexpr char digits[] = "0123456789abcdef";
  out.push_back(digits[(v >> 4) & 0xf]);
  out.push_back(digits[v & 0xf]);
}

void append_dec(std::string& out, unsigned v, int width) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%0*u", width, v);
  out += buf;
}

}  // namespace

Synset parse_data_line(std::string_view line, PartOfSpeech file) {
  if (line.starts_with("  ")) malformed("license header line", 0);
  auto bar = line.find('|');
  if (bar == std::string_view::npos) malformed("missing '|' gloss separator", line.size());
  if (bar == 0 || line[bar - 1] != ' ') malformed("expected space before '|'", bar);

  auto fields = split_fields(line.substr(0, bar - 1));
  std::size_t i = 0;
  auto next = [&](std::string_view what) -> const Token& {
    if (i >= fields.size()) malformed("missing " + std::string(what), bar);
    return fields[i++];
  };

  Synset s;
  s.offset = expect_number(next("offset"), 8, 10, "offset");
  s.lex_filenum = static_cast<std::uint8_t>(expect_number(next("lex_filenum"), 2, 10, "lex_filenum"));
  {
    const Token& t = next("ss_type");
    auto pos = t.text.size() == 1 ? pos_from_tag(t.text[0]) : std::nullopt;
    if (!pos) malformed("bad ss_type '" + std::string(t.text) + "'", t.column);
    if (!pos_compatible(*pos, file)) {
      throw ParseError(Errc::PosMismatch,
                       "ss_type '" + std::string(t.text) + "' in data." +
                           std::string(file_suffix(file)) + " at byte " + std::to_string(t.column),
                       t.column);
    }
    s.ss_type = *pos;
  }

  const Token& wcnt_tok = next("w_cnt");
  auto w_cnt = expect_number(wcnt_tok, 2, 16, "w_cnt");
  if (w_cnt == 0) malformed("w_cnt is zero", wcnt_tok.column);
  s.words.reserve(w_cnt);
  for (std::uint32_t w = 0; w < w_cnt; ++w) {
    if (i + 1 >= fields.size()) count_mismatch("w_cnt declares " + std::to_string(w_cnt) + " words", wcnt_tok.column);
    const Token& word = fields[i++];
    const Token& lex = fields[i++];
    auto lex_id = fixed_number(lex.text, 1, 16);
    if (!lex_id) {
      count_mismatch("w_cnt declares " + std::to_string(w_cnt) + " words, found " + std::to_string(w),
                     lex.column);
    }
    s.words.push_back({std::string(word.text), static_cast<std::uint8_t>(*lex_id)});
  }

  const Token& pcnt_tok = next("p_cnt");
  auto p_cnt_v = fixed_number(pcnt_tok.text, 3, 10);
  if (!p_cnt_v) count_mismatch("expected 3-digit p_cnt after " + std::to_string(w_cnt) + " words", pcnt_tok.column);
  const std::uint32_t p_cnt = *p_cnt_v;

  const std::size_t remaining = fields.size() - i;
  if (remaining < std::size_t{4} * p_cnt) {
    count_mismatch("p_cnt declares " + std::to_string(p_cnt) + " pointers", pcnt_tok.column);
  }
  s.pointers.reserve(p_cnt);
  for (std::uint32_t p = 0; p < p_cnt; ++p) {
    Pointer ptr;
    const Token& sym = fields[i++];
    ptr.symbol = std::string(sym.text);
    ptr.target_offset = expect_number(fields[i++], 8, 10, "pointer offset");
    const Token& pos_tok = fields[i++];
    auto pos = pos_tok.text.size() == 1 ? pos_from_tag(pos_tok.text[0]) : std::nullopt;
    if (!pos) {
      // Usually means p_cnt is larger than the real pointer list.
      count_mismatch("bad pointer pos '" + std::string(pos_tok.text) + "' (p_cnt " + std::to_string(p_cnt) + ")",
                     pos_tok.column);
    }
    ptr.target_pos = *pos;
    auto st = expect_number(fields[i++], 4, 16, "pointer source/target");
    ptr.source_word = static_cast<std::uint8_t>(st >> 8);
    ptr.target_word = static_cast<std::uint8_t>(st & 0xff);
    if ((ptr.source_word == 0) != (ptr.target_word == 0)) {
      malformed("pointer source/target must both be zero or both non-zero", fields[i - 1].column);
    }
    s.pointers.push_back(std::move(ptr));
  }

  if (i < fields.size()) {
    if (file_pos(file) != PartOfSpeech::Verb) {
      count_mismatch("tokens after the " + std::to_string(p_cnt) + " declared pointers", fields[i].column);
    }
    const Token& fcnt_tok = fields[i++];
    auto f_cnt = expect_number(fcnt_tok, 2, 10, "f_cnt");
    if (fields.size() - i != std::size_t{3} * f_cnt) {
      count_mismatch("f_cnt declares " + std::to_string(f_cnt) + " frames", fcnt_tok.column);
    }
    s.frames.reserve(f_cnt);
    for (std::uint32_t f = 0; f < f_cnt; ++f) {
      if (fields[i].text != "+") malformed("expected '+' before frame", fields[i].column);
      ++i;
      VerbFrame fr;
      fr.frame_number = static_cast<std::uint8_t>(expect_number(fields[i++], 2, 10, "f_num"));
      fr.word_number = static_cast<std::uint8_t>(expect_number(fields[i++], 2, 16, "w_num"));
      s.frames.push_back(fr);
    }
  }

  std::string_view rest = line.substr(bar + 1);
  if (!rest.empty()) {
    if (rest.front() != ' ') malformed("expected space after '|'", bar + 1);
    rest.remove_prefix(1);
  }
  auto last = rest.find_last_not_of(" \t");
  if (last == std::string_view::npos) {
    s.gloss_padding = std::string(rest);
  } else {
    auto first = rest.find_first_not_of(" \t");
    s.gloss_indent = std::string(rest.substr(0, first));
    s.gloss = std::string(rest.substr(first, last + 1 - first));
    s.gloss_padding = std::string(rest.substr(last + 1));
  }
  return s;
}

std::string serialize_data_line(const Synset& s) {
  std::string out;
  out.reserve(64 + s.gloss.size() + 24 * s.pointers.size());
  out += format_offset(s.offset);
  out.push_back(' ');
  append_dec(out, s.lex_filenum, 2);
  out.push_back(' ');
  out.push_back(pos_tag(s.ss_type));
  out.push_back(' ');
  append_hex2(out, static_cast<unsigned>(s.words.size()));
  for (const auto& w : s.words) {
    out.push_back(' ');
    out += w.lemma;
    out.push_back(' ');
    out.push_back("0123456789abcdef"[w.lex_id & 0xf]);
  }
  out.push_back(' ');
  append_dec(out, static_cast<unsigned>(s.pointers.size()), 3);
  for (const auto& p : s.pointers) {
    out.push_back(' ');
    out += p.symbol;
    out.push_back(' ');
    out += format_offset(p.target_offset);
    out.push_back(' ');
    out.push_back(pos_tag(p.target_pos));
    out.push_back(' ');
    append_hex2(out, p.source_word);
    append_hex2(out, p.target_word);
  }
  if (!s.frames.empty()) {
    out.push_back(' ');
    append_dec(out, static_cast<unsigned>(s.frames.size()), 2);
    for (const auto& f : s.frames) {
      out += " + ";
      append_dec(out, f.frame_number, 2);
      out.push_back(' ');
      append_hex2(out, f.word_number);
    }
  }
  out += " | ";
  out += s.gloss_indent;
  out += s.gloss;
  out += s.gloss_padding;
  return out;
}

DataFile parse_data_file(std::string_view contents, PartOfSpeech file) {
  if (contents.empty()) throw Error(Errc::EmptyFile, "empty data file");
  DataFile out;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    auto nl = contents.find('\n', pos);
    auto end = nl == std::string_view::npos ? contents.size() : nl;
    std::string_view line = contents.substr(pos, end - pos);
    if (line.ends_with('\r')) line.remove_suffix(1);
    pos = nl == std::string_view::npos ? contents.size() : nl + 1;

    ++out.line_count;
    if (line.starts_with("  ")) {
      ++out.header_count;
      continue;
    }
    try {
      out.synsets.push_back(parse_data_line(line, file));
    } catch (const ParseError& e) {
      throw ParseError(e.code(), "line " + std::to_string(out.line_count) + ": " + e.what(), e.column(),
                       out.line_count);
    }
  }
  return out;
}

void SynsetDb::add_file(PartOfSpeech pos, DataFile file, std::filesystem::path source) {
  const auto idx = file_index(pos);
  auto& map = maps_[idx];
  map.clear();
  for (auto& s : file.synsets) {
    auto offset = s.offset;
    map.insert_or_assign(offset, std::move(s));
  }
  files_[idx] = FileInfo{std::move(source), file.line_count, file.header_count};
  loaded_[idx] = true;
}

const Synset* SynsetDb::find(PartOfSpeech pos, std::uint32_t offset) const {
  const auto& map = maps_[file_index(pos)];
  auto it = map.find(offset);
  return it == map.end() ? nullptr : &it->second;
}

const std::map<std::uint32_t, Synset>& SynsetDb::synsets(PartOfSpeech pos) const {
  return maps_[file_index(pos)];
}

const SynsetDb::FileInfo& SynsetDb::file_info(PartOfSpeech pos) const { return files_[file_index(pos)]; }

bool SynsetDb::loaded(PartOfSpeech pos) const { return loaded_[file_index(pos)]; }

bool SynsetDb::empty() const { return size() == 0; }

std::size_t SynsetDb::size() const {
  std::size_t n = 0;
  for (const auto& m : maps_) n += m.size();
  return n;
}

SynsetDb load_dict(const std::filesystem::path& dict_dir, std::span<const PartOfSpeech> which) {
  SynsetDb db;
  for (auto pos : which) {
    auto path = dict_dir / ("data." + std::string(file_suffix(pos)));
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    auto contents = std::move(buf).str();
    try {
      db.add_file(file_pos(pos), parse_data_file(contents, file_pos(pos)), path);
    } catch (const ParseError& e) {
      throw ParseError(e.code(), path.string() + ": " + e.what(), e.column(), e.line());
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ": " + e.what());
    }
  }
  return db;
}

DanglingPointerError::DanglingPointerError(const Pointer& p)
    : Error(Errc::DanglingPointer, "dangling pointer '" + p.symbol + "' -> " + format_offset(p.target_offset) +
                                       " " + pos_tag(p.target_pos)),
      pointer_(p) {}

const Synset& resolve_pointer(const SynsetDb& db, const Pointer& p) {
  if (const Synset* s = db.find(p.target_pos, p.target_offset)) return *s;
  throw DanglingPointerError(p);
}

std::vector<PointerRef> dangling_pointers(const SynsetDb& db) {
  std::vector<PointerRef> out;
  for (auto fp : kFilePos) {
    for (const auto& [offset, s] : db.synsets(fp)) {
      for (const auto& p : s.pointers) {
        if (!db.find(p.target_pos, p.target_offset)) out.push_back({s.ss_type, offset, p});
      }
    }
  }
  return out;
}

std::vector<PointerRef> asymmetric_antonyms(const SynsetDb& db) {
  std::vector<PointerRef> out;
  for (auto fp : kFilePos) {
    for (const auto& [offset, s] : db.synsets(fp)) {
      for (const auto& p : s.pointers) {
        if (p.symbol != "!") continue;
        const Synset* target = db.find(p.target_pos, p.target_offset);
        if (!target) continue;
        bool mirrored = false;
        for (const auto& back : target->pointers) {
          if (back.symbol == "!" && back.target_offset == offset &&
              file_pos(back.target_pos) == file_pos(s.ss_type) && back.source_word == p.target_word &&
              back.target_word == p.source_word) {
            mirrored = true;
            break;
          }
        }
        if (!mirrored) out.push_back({s.ss_type, offset, p});
      }
    }
  }
  return out;
}

std::array<PosCounts, 4> count_report(const SynsetDb& db) {
  std::array<PosCounts, 4> out;
  for (std::size_t i = 0; i < kFilePos.size(); ++i) {
    auto fp = kFilePos[i];
    auto& row = out[i];
    row.pos = fp;
    for (const auto& [offset, s] : db.synsets(fp)) {
      ++row.synsets;
      row.senses += s.words.size();
    }
    row.lines = db.loaded(fp) ? db.file_info(fp).line_count : 0;
  }
  return out;
}

}  // namespace sld::wn
