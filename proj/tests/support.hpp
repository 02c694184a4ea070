#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <string_view>

#include "sld/store.hpp"
#include "sld/wordnet.hpp"

namespace sld::testing {

inline constexpr std::string_view kAcroscopicLine =
    "00002730 00 a 01 acroscopic 0 002 ;c 06076105 n 0000 ! 00002843 a 0101 | facing or on the side toward the apex";
inline constexpr std::string_view kBasisopicLine =
    "00002843 00 a 01 basisopic 0 002 ;c 06076105 n 0000 ! 00002730 a 0101 | facing or on the side toward the base";
inline constexpr std::string_view kEmergentLine =
    "00003552 00 s 02 emergent 0 emerging 0 003 & 00003356 a 0000 + 02631097 v 0102 + 00051513 n 0101 | coming into "
    "existence; \"an emergent republic\"";

inline constexpr std::string_view kEntityLine =
    "00001740 03 n 01 entity 0 003 ~ 00001930 n 0000 ~ 00002137 n 0000 ~ 04424418 n 0000 | that which is perceived "
    "or known or inferred to have its own distinct existence (living or nonliving)  ";
// Real line layout with the gloss text as quoted in the export examples.
inline constexpr std::string_view kBurpLine =
    "00003431 29 v 04 burp 0 bubble 0 belch 0 eruct 0 005 @ 00105333 v 0000 + 00117578 n 0405 + 00117578 n 0301 + "
    "09229709 n 0201 + 00117578 n 0103 01 + 02 00 | expel gas from the stomach; \"Please don't burp at the table\".  ";
inline constexpr std::string_view kOctaveLine =
    "15296258 28 n 01 octave 0 001 @ 15162210 n 0000 | a feast day and the seven days following it.  ";
inline constexpr std::string_view kRealTimeLine =
    "15298695 28 n 01 real_time 0 002 @ 15113229 n 0000 ;c 06128570 n 0000 | (computer science) the time it takes "
    "for a process under computer control to occur.  ";

inline constexpr std::string_view kEntityGloss =
    "that which is perceived or known or inferred to have its own distinct existence (living or nonliving)";

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    std::random_device rd;
    for (;;) {
      path_ = base / ("sld-test-" + std::to_string(rd()));
      if (std::filesystem::create_directory(path_)) break;
    }
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline wn::DataFile data_file(std::initializer_list<std::string_view> lines, wn::PartOfSpeech pos) {
  std::string contents;
  for (auto l : lines) {
    contents += l;
    contents += '\n';
  }
  return wn::parse_data_file(contents, pos);
}

/// The three adjective lines plus entity, octave, real_time and burp.
inline wn::SynsetDb sample_db() {
  wn::SynsetDb db;
  db.add_file(wn::PartOfSpeech::Adjective, data_file({kAcroscopicLine, kBasisopicLine, kEmergentLine}, wn::PartOfSpeech::Adjective));
  db.add_file(wn::PartOfSpeech::Noun, data_file({kEntityLine, kOctaveLine, kRealTimeLine}, wn::PartOfSpeech::Noun));
  db.add_file(wn::PartOfSpeech::Verb, data_file({kBurpLine}, wn::PartOfSpeech::Verb));
  return db;
}

/// sample_db entries plus one actor of every role: sol (1), cre (2), tec (2), org (3).
inline store::Store sample_store() {
  store::Store st;
  st.upsert_entries(store::build_entries(sample_db()));
  st.add_actor({"sol", "Solver", store::ActorRole::SolverParticipant});
  st.add_actor({"cre", "Creative", store::ActorRole::CreativeExpert});
  st.add_actor({"tec", "Technical", store::ActorRole::TechnicalExpert});
  st.add_actor({"org", "Organizer", store::ActorRole::Organizer});
  return st;
}

/// WordNet dict directory from SLD_WORDNET_DICT, or empty when unavailable.
inline std::filesystem::path wordnet_dict() {
  const char* v = std::getenv("SLD_WORDNET_DICT");
  if (!v || !*v) return {};
  std::filesystem::path p(v);
  return std::filesystem::exists(p / "data.noun") ? p : std::filesystem::path{};
}

}  // namespace sld::testing
