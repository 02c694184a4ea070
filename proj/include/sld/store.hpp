#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sld/error.hpp"
#include "sld/wordnet.hpp"

namespace sld::store {

enum class Language : std::uint8_t { EN, ES, FR };

std::string_view language_code(Language lang) noexcept;  // "en", "es", "fr"
std::optional<Language> language_from_code(std::string_view code) noexcept;

/// Languages a translation can be captured in. English is the source language.
inline bool is_target_language(Language lang) noexcept { return lang != Language::EN; }

enum class ActorRole : std::uint8_t { SolverParticipant, CreativeExpert, TechnicalExpert, Organizer };

int rank(ActorRole role) noexcept;
std::string_view role_name(ActorRole role) noexcept;  // "solver_participant", ...
std::optional<ActorRole> role_from_name(std::string_view name) noexcept;

struct Actor {
  std::string id;
  std::string display_name;
  ActorRole role = ActorRole::SolverParticipant;

  bool operator==(const Actor&) const = default;
};

enum class TranslationState : std::uint8_t { Draft, Captured, Reviewed, Rejected };

std::string_view state_name(TranslationState state) noexcept;
std::optional<TranslationState> state_from_name(std::string_view name) noexcept;

struct TranslationRecord {
  Language language = Language::ES;
  std::string text;
  std::optional<std::string> definition;
  std::string captured_by;
  std::optional<std::string> reviewed_by;
  TranslationState state = TranslationState::Draft;

  bool operator==(const TranslationRecord&) const = default;
};

enum class AssetKind : std::uint8_t { VoiceLemma, VoiceDefinition, Image };
enum class AssetFormat : std::uint8_t { Wav, Mp3, Png, Jpg };

std::string_view asset_kind_name(AssetKind kind) noexcept;
std::optional<AssetKind> asset_kind_from_name(std::string_view name) noexcept;
std::string_view asset_format_name(AssetFormat format) noexcept;
std::optional<AssetFormat> asset_format_from_name(std::string_view name) noexcept;

struct Asset {
  AssetKind kind = AssetKind::VoiceLemma;
  Language language = Language::EN;
  std::string path;  // relative to the store directory, '/' separated
  std::uint64_t bytes = 0;
  AssetFormat format = AssetFormat::Wav;

  bool operator==(const Asset&) const = default;
};

/// Voice assets must be audio, images must be images.
bool asset_format_allowed(AssetKind kind, AssetFormat format) noexcept;

struct LexicalEntry {
  std::string id;  // "{pos-tag}-{offset}", e.g. "n-00001740"
  wn::PartOfSpeech pos = wn::PartOfSpeech::Noun;
  std::uint32_t offset = 0;
  std::string lemma;
  std::uint32_t synonym_count = 1;
  std::string gloss;
  std::map<Language, TranslationRecord> translations;
  std::vector<Asset> assets;

  const Asset* asset(AssetKind kind, Language lang) const;
  bool voice_done(AssetKind kind, Language lang) const { return asset(kind, lang) != nullptr; }
  const TranslationRecord* translation(Language lang) const;

  bool operator==(const LexicalEntry&) const = default;
};

std::string entry_id(wn::PartOfSpeech pos, std::uint32_t offset);

/// Drops the adjective position markers "(a)", "(p)" and "(ip)" that data.adj appends to some words.
std::string strip_syntactic_marker(std::string_view word);

/// One entry per synset, ordered by (data file, offset).
std::vector<LexicalEntry> build_entries(const wn::SynsetDb& db);

/// A lexical element seen in free text that the store does not hold yet.
struct Candidate {
  std::string lemma;
  std::uint32_t count = 0;
  std::vector<std::string> sources;

  bool operator==(const Candidate&) const = default;
};

enum class Verdict : std::uint8_t { Approve, Reject };

class Store {
 public:
  void add_actor(Actor actor);
  const Actor* actor(std::string_view id) const;
  const std::map<std::string, Actor, std::less<>>& actors() const { return actors_; }

  /// Inserts entries, or refreshes lemma/gloss/synonym_count of ids already present
  /// (translations and assets survive re-import).
  void upsert_entries(std::vector<LexicalEntry> entries);

  const LexicalEntry* find(std::string_view id) const;
  const std::vector<LexicalEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  /// Entries whose lemma (case-folded) equals `lemma`, in store order.
  std::vector<const LexicalEntry*> find_by_lemma(std::string_view lemma) const;

  TranslationRecord save_draft(std::string_view entry_id, Language lang, std::string text,
                               std::optional<std::string> definition, std::string_view actor_id);
  TranslationRecord capture_translation(std::string_view entry_id, Language lang, std::string text,
                                        std::optional<std::string> definition, std::string_view actor_id);
  TranslationRecord review_translation(std::string_view entry_id, Language lang, std::string_view reviewer_id,
                                       Verdict verdict);

  /// Registers `asset` after checking the file under `root`. Replaces any asset of the same (kind, language).
  const LexicalEntry& attach_asset(const std::filesystem::path& root, std::string_view entry_id, Asset asset);

  /// File name stem for voice output: the lemma, or "lemma-offset" when several
  /// entries of the same data file share the lemma. Unsafe path characters are escaped.
  std::string file_stem(const LexicalEntry& entry) const;

  const std::vector<Candidate>& candidates() const { return candidates_; }
  /// Merges by lemma; lemmas already present as entries are ignored. Returns how many were new.
  std::size_t add_candidates(const std::vector<Candidate>& candidates, std::string_view source);
  /// Replaces the candidate list verbatim (used when loading).
  void restore_candidates(std::vector<Candidate> candidates) { candidates_ = std::move(candidates); }

  /// Throws CorruptRecord when any review invariant is broken.
  void check_invariants() const;

  bool operator==(const Store& other) const {
    return actors_ == other.actors_ && entries_ == other.entries_ && candidates_ == other.candidates_;
  }

 private:
  LexicalEntry& entry_mut(std::string_view id);
  const Actor& actor_or_throw(std::string_view id) const;
  void reindex();

  std::map<std::string, Actor, std::less<>> actors_;
  std::vector<LexicalEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_lemma_;
  std::vector<Candidate> candidates_;
};

/// Relative path (to the store directory) where voice audio for `entry` lives.
std::string voice_asset_path(const Store& store, const LexicalEntry& entry, AssetKind kind);

/// "<stem>.wav" for lemma audio, "<stem>_m.wav" for definition audio.
std::string voice_file_name(std::string_view stem, AssetKind kind);

struct Manifest {
  std::string format;
  std::size_t entries = 0;
  std::size_t actors = 0;
  std::size_t candidates = 0;
};

inline constexpr std::string_view kStoreFormat = "sld-store/1";

Manifest save_store(const Store& store, const std::filesystem::path& dir);
Store load_store(const std::filesystem::path& dir);

/// The six ordered steps of capturing one entry in one language.
enum class CaptureStep : int {
  SelectActor = 1,
  ChooseLanguage = 2,
  FetchElement = 3,
  CaptureTranslation = 4,
  CaptureDefinition = 5,
  AttachImage = 6,
};

class CaptureSession {
 public:
  using Clock = std::chrono::system_clock;

  explicit CaptureSession(std::string actor_id, Clock::time_point now = Clock::now());

  void choose_language(Language lang, Clock::time_point now = Clock::now());
  void fetch_element(std::string entry_id, Clock::time_point now = Clock::now());
  /// Moves to a later step (4..6). Steps may be skipped but never revisited.
  void advance(CaptureStep step, Clock::time_point now = Clock::now());

  const std::string& actor() const { return actor_; }
  std::optional<Language> language() const { return language_; }
  const std::string& entry() const { return entry_; }
  CaptureStep step() const { return step_; }
  Clock::time_point started_at() const { return started_at_; }
  Clock::time_point updated_at() const { return updated_at_; }

 private:
  std::string actor_;
  std::optional<Language> language_;
  std::string entry_;
  CaptureStep step_ = CaptureStep::SelectActor;
  Clock::time_point started_at_;
  Clock::time_point updated_at_;
};

}  // namespace sld::store
