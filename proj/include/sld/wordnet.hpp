#pragma once

// Reader/writer for WordNet 3.0 `data.{noun,verb,adj,adv}` files.
//
// One non-header line is one synset:
//
//   offset lex_filenum ss_type w_cnt (word lex_id)+ p_cnt (ptr)* [f_cnt (+ f_num w_num)*] | gloss
//
// w_cnt and lex_id are hex, p_cnt is decimal, a pointer's source/target field is
// four hex digits split 2/2. Lines that start with two spaces are the license header.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sld/error.hpp"

namespace sld::wn {

enum class PartOfSpeech : std::uint8_t { Noun, Verb, Adjective, AdjectiveSatellite, Adverb };

inline constexpr std::array<PartOfSpeech, 4> kFilePos = {
    PartOfSpeech::Noun, PartOfSpeech::Verb, PartOfSpeech::Adjective, PartOfSpeech::Adverb};

char pos_tag(PartOfSpeech pos) noexcept;
std::optional<PartOfSpeech> pos_from_tag(char tag) noexcept;

/// The POS whose data file holds synsets of `pos` (satellites live in data.adj).
PartOfSpeech file_pos(PartOfSpeech pos) noexcept;

/// Index 0..3 of the data file (noun, verb, adj, adv).
std::size_t file_index(PartOfSpeech pos) noexcept;

/// "noun", "verb", "adj", "adv".
std::string_view file_suffix(PartOfSpeech pos) noexcept;

/// Accepts the file suffixes and the long names ("adjective", "adverb").
std::optional<PartOfSpeech> pos_from_name(std::string_view name) noexcept;

struct Pointer {
  std::string symbol;
  std::uint32_t target_offset = 0;
  PartOfSpeech target_pos = PartOfSpeech::Noun;
  std::uint8_t source_word = 0;  // 0 = whole synset
  std::uint8_t target_word = 0;

  bool is_lexical() const noexcept { return source_word != 0; }
  bool operator==(const Pointer&) const = default;
};

struct WordSense {
  std::string lemma;  // underscores stand for spaces
  std::uint8_t lex_id = 0;

  bool operator==(const WordSense&) const = default;
};

struct VerbFrame {
  std::uint8_t frame_number = 0;
  std::uint8_t word_number = 0;  // 0 = all words of the synset

  bool operator==(const VerbFrame&) const = default;
};

struct Synset {
  std::uint32_t offset = 0;
  std::uint8_t lex_filenum = 0;
  PartOfSpeech ss_type = PartOfSpeech::Noun;
  std::vector<WordSense> words;
  std::vector<Pointer> pointers;
  std::vector<VerbFrame> frames;
  std::string gloss;
  // Whitespace that followed the gloss on the source line. The distributed
  // files pad every gloss with two spaces; kept so lines re-serialize exactly.
  std::string gloss_padding;
  // Extra blanks between "| " and the gloss; a few dozen distributed lines have one.
  std::string gloss_indent;

  bool operator==(const Synset&) const = default;
};

Synset parse_data_line(std::string_view line, PartOfSpeech file_pos);
std::string serialize_data_line(const Synset& synset);

/// Zero-padded 8-digit rendering of an offset.
std::string format_offset(std::uint32_t offset);

struct DataFile {
  std::vector<Synset> synsets;
  std::size_t line_count = 0;
  std::size_t header_count = 0;
};

/// Parses a whole data file. Accepts LF and CRLF line endings. Errors carry the 1-based line number.
DataFile parse_data_file(std::string_view contents, PartOfSpeech file_pos);

/// Immutable once loaded; safe to share between readers.
class SynsetDb {
 public:
  struct FileInfo {
    std::filesystem::path source;
    std::size_t line_count = 0;
    std::size_t header_count = 0;
  };

  /// Adds the parsed file's synsets under `file_pos`. Replaces a previously added file for that POS.
  void add_file(PartOfSpeech file_pos, DataFile file, std::filesystem::path source = {});

  const Synset* find(PartOfSpeech pos, std::uint32_t offset) const;
  const std::map<std::uint32_t, Synset>& synsets(PartOfSpeech pos) const;
  const FileInfo& file_info(PartOfSpeech pos) const;
  bool loaded(PartOfSpeech pos) const;
  bool empty() const;
  std::size_t size() const;

 private:
  std::array<std::map<std::uint32_t, Synset>, 4> maps_;
  std::array<FileInfo, 4> files_;
  std::array<bool, 4> loaded_{};
};

/// Reads `dict_dir/data.<suffix>` for each requested POS.
SynsetDb load_dict(const std::filesystem::path& dict_dir, std::span<const PartOfSpeech> which);

class DanglingPointerError : public Error {
 public:
  explicit DanglingPointerError(const Pointer& p);
  const Pointer& pointer() const noexcept { return pointer_; }

 private:
  Pointer pointer_;
};

const Synset& resolve_pointer(const SynsetDb& db, const Pointer& p);

struct PointerRef {
  PartOfSpeech source_pos;
  std::uint32_t source_offset;
  Pointer pointer;
};

/// Every pointer whose target is not in `db`. Partial loads produce these by design.
std::vector<PointerRef> dangling_pointers(const SynsetDb& db);

/// "!" pointers whose target has no "!" pointer back to the source (report only).
std::vector<PointerRef> asymmetric_antonyms(const SynsetDb& db);

struct PosCounts {
  PartOfSpeech pos = PartOfSpeech::Noun;
  std::size_t synsets = 0;
  std::size_t senses = 0;
  std::size_t lines = 0;  // raw file lines, headers included

  bool operator==(const PosCounts&) const = default;
};

/// One row per data file, in noun, verb, adj, adv order.
std::array<PosCounts, 4> count_report(const SynsetDb& db);

}  // namespace sld::wn
