#include "sld/store.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <tuple>

#include "sld/text.hpp"

namespace sld::store {

using json = nlohmann::json;
using wn::PartOfSpeech;

std::string_view language_code(Language lang) noexcept {
  switch (lang) {
    case Language::EN: return "en";
    case Language::ES: return "es";
    case Language::FR: return "fr";
  }
  return "en";
}

std::optional<Language> language_from_code(std::string_view code) noexcept {
  if (code == "en" || code == "EN") return Language::EN;
  if (code == "es" || code == "ES") return Language::ES;
  if (code == "fr" || code == "FR") return Language::FR;
  return std::nullopt;
}

int rank(ActorRole role) noexcept {
  switch (role) {
    case ActorRole::SolverParticipant: return 1;
    case ActorRole::CreativeExpert: return 2;
    case ActorRole::TechnicalExpert: return 2;
    case ActorRole::Organizer: return 3;
  }
  return 0;
}

std::string_view role_name(ActorRole role) noexcept {
  switch (role) {
    case ActorRole::SolverParticipant: return "solver_participant";
    case ActorRole::CreativeExpert: return "creative_expert";
    case ActorRole::TechnicalExpert: return "technical_expert";
    case ActorRole::Organizer: return "organizer";
  }
  return "";
}

std::optional<ActorRole> role_from_name(std::string_view name) noexcept {
  for (auto r : {ActorRole::SolverParticipant, ActorRole::CreativeExpert, ActorRole::TechnicalExpert,
                 ActorRole::Organizer}) {
    if (role_name(r) == name) return r;
  }
  return std::nullopt;
}

std::string_view state_name(TranslationState state) noexcept {
  switch (state) {
    case TranslationState::Draft: return "draft";
    case TranslationState::Captured: return "captured";
    case TranslationState::Reviewed: return "reviewed";
    case TranslationState::Rejected: return "rejected";
  }
  return "";
}

std::optional<TranslationState> state_from_name(std::string_view name) noexcept {
  for (auto s : {TranslationState::Draft, TranslationState::Captured, TranslationState::Reviewed,
                 TranslationState::Rejected}) {
    if (state_name(s) == name) return s;
  }
  return std::nullopt;
}

std::string_view asset_kind_name(AssetKind kind) noexcept {
  switch (kind) {
    case AssetKind::VoiceLemma: return "voice_lemma";
    case AssetKind::VoiceDefinition: return "voice_definition";
    case AssetKind::Image: return "image";
  }
  return "";
}

std::optional<AssetKind> asset_kind_from_name(std::string_view name) noexcept {
  for (auto k : {AssetKind::VoiceLemma, AssetKind::VoiceDefinition, AssetKind::Image}) {
    if (asset_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view asset_format_name(AssetFormat format) noexcept {
  switch (format) {
    case AssetFormat::Wav: return "wav";
    case AssetFormat::Mp3: return "mp3";
    case AssetFormat::Png: return "png";
    case AssetFormat::Jpg: return "jpg";
  }
  return "";
}

std::optional<AssetFormat> asset_format_from_name(std::string_view name) noexcept {
  if (name == "jpeg") return AssetFormat::Jpg;
  for (auto f : {AssetFormat::Wav, AssetFormat::Mp3, AssetFormat::Png, AssetFormat::Jpg}) {
    if (asset_format_name(f) == name) return f;
  }
  return std::nullopt;
}

bool asset_format_allowed(AssetKind kind, AssetFormat format) noexcept {
  const bool audio = format == AssetFormat::Wav || format == AssetFormat::Mp3;
  return kind == AssetKind::Image ? !audio : audio;
}

const Asset* LexicalEntry::asset(AssetKind kind, Language lang) const {
  for (const auto& a : assets) {
    if (a.kind == kind && a.language == lang) return &a;
  }
  return nullptr;
}

const TranslationRecord* LexicalEntry::translation(Language lang) const {
  auto it = translations.find(lang);
  return it == translations.end() ? nullptr : &it->second;
}

std::string entry_id(PartOfSpeech pos, std::uint32_t offset) {
  return std::string(1, wn::pos_tag(pos)) + "-" + wn::format_offset(offset);
}

std::string strip_syntactic_marker(std::string_view word) {
  for (std::string_view marker : {"(a)", "(p)", "(ip)"}) {
    if (word.size() > marker.size() && word.ends_with(marker)) {
      return std::string(word.substr(0, word.size() - marker.size()));
    }
  }
  return std::string(word);
}

namespace {

auto order_key(const LexicalEntry& e) { return std::make_tuple(wn::file_index(e.pos), e.offset); }

}  // namespace

std::vector<LexicalEntry> build_entries(const wn::SynsetDb& db) {
  std::vector<LexicalEntry> out;
  out.reserve(db.size());
  for (auto fp : wn::kFilePos) {
    for (const auto& [offset, s] : db.synsets(fp)) {
      LexicalEntry e;
      e.id = entry_id(s.ss_type, offset);
      e.pos = s.ss_type;
      e.offset = offset;
      e.lemma = strip_syntactic_marker(s.words.front().lemma);
      e.synonym_count = static_cast<std::uint32_t>(s.words.size());
      e.gloss = s.gloss;
      out.push_back(std::move(e));
    }
  }
  return out;
}

void Store::add_actor(Actor actor) {
  if (actor.id.empty()) throw Error(Errc::InvalidArgument, "actor id is empty");
  if (actors_.contains(actor.id)) throw Error(Errc::DuplicateActor, "actor '" + actor.id + "' already exists");
  auto id = actor.id;
  actors_.emplace(std::move(id), std::move(actor));
}

const Actor* Store::actor(std::string_view id) const {
  auto it = actors_.find(id);
  return it == actors_.end() ? nullptr : &it->second;
}

const Actor& Store::actor_or_throw(std::string_view id) const {
  if (const Actor* a = actor(id)) return *a;
  throw Error(Errc::UnknownActor, "unknown actor '" + std::string(id) + "'");
}

void Store::upsert_entries(std::vector<LexicalEntry> entries) {
  for (auto& e : entries) {
    if (e.lemma.empty()) throw Error(Errc::InvalidArgument, "entry " + e.id + " has an empty lemma");
    if (e.synonym_count < 1) throw Error(Errc::InvalidArgument, "entry " + e.id + " has no synonyms");
    auto it = index_.find(e.id);
    if (it != index_.end()) {
      auto& cur = entries_[it->second];
      cur.lemma = std::move(e.lemma);
      cur.gloss = std::move(e.gloss);
      cur.synonym_count = e.synonym_count;
    } else {
      index_.emplace(e.id, entries_.size());
      entries_.push_back(std::move(e));
    }
  }
  reindex();
  // Lemmas that just became entries are no longer candidates.
  std::erase_if(candidates_, [&](const Candidate& c) { return by_lemma_.contains(text::fold_case(c.lemma)); });
}

void Store::reindex() {
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const LexicalEntry& a, const LexicalEntry& b) { return order_key(a) < order_key(b); });
  index_.clear();
  by_lemma_.clear();
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    index_.emplace(entries_[i].id, i);
    by_lemma_[text::fold_case(entries_[i].lemma)].push_back(i);
  }
}

const LexicalEntry* Store::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

LexicalEntry& Store::entry_mut(std::string_view id) {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) throw Error(Errc::UnknownEntry, "unknown entry '" + std::string(id) + "'");
  return entries_[it->second];
}

std::vector<const LexicalEntry*> Store::find_by_lemma(std::string_view lemma) const {
  std::vector<const LexicalEntry*> out;
  auto it = by_lemma_.find(text::fold_case(lemma));
  if (it == by_lemma_.end()) return out;
  for (auto i : it->second) out.push_back(&entries_[i]);
  return out;
}

namespace {

void require_target_language(Language lang) {
  if (!is_target_language(lang)) {
    throw Error(Errc::InvalidLanguage, "translations are captured in es or fr, not en");
  }
}

std::optional<std::string> normalize_definition(std::optional<std::string> definition) {
  if (definition && text::trim(*definition).empty()) return std::nullopt;
  return definition;
}

}  // namespace

TranslationRecord Store::save_draft(std::string_view id, Language lang, std::string text_value,
                                    std::optional<std::string> definition, std::string_view actor_id) {
  auto& entry = entry_mut(id);
  actor_or_throw(actor_id);
  require_target_language(lang);
  if (auto* cur = entry.translation(lang)) {
    if (cur->state == TranslationState::Reviewed) {
      throw Error(Errc::AlreadyReviewed, entry.id + " " + std::string(language_code(lang)) + " is already reviewed");
    }
    if (cur->state == TranslationState::Captured) {
      throw Error(Errc::WorkflowConflict, entry.id + " " + std::string(language_code(lang)) +
                                              " is captured and awaiting review");
    }
  }
  TranslationRecord rec;
  rec.language = lang;
  rec.text = std::move(text_value);
  rec.definition = normalize_definition(std::move(definition));
  rec.captured_by = std::string(actor_id);
  rec.state = TranslationState::Draft;
  entry.translations.insert_or_assign(lang, rec);
  return rec;
}

TranslationRecord Store::capture_translation(std::string_view id, Language lang, std::string text_value,
                                             std::optional<std::string> definition, std::string_view actor_id) {
  auto& entry = entry_mut(id);
  actor_or_throw(actor_id);
  require_target_language(lang);
  if (text::trim(text_value).empty()) throw Error(Errc::EmptyText, "translation text is empty");
  if (auto* cur = entry.translation(lang); cur && cur->state == TranslationState::Reviewed) {
    throw Error(Errc::AlreadyReviewed, entry.id + " " + std::string(language_code(lang)) + " is already reviewed");
  }
  TranslationRecord rec;
  rec.language = lang;
  rec.text = std::move(text_value);
  rec.definition = normalize_definition(std::move(definition));
  rec.captured_by = std::string(actor_id);
  rec.state = TranslationState::Captured;
  entry.translations.insert_or_assign(lang, rec);
  return rec;
}

TranslationRecord Store::review_translation(std::string_view id, Language lang, std::string_view reviewer_id,
                                            Verdict verdict) {
  auto& entry = entry_mut(id);
  const Actor& reviewer = actor_or_throw(reviewer_id);
  require_target_language(lang);
  auto it = entry.translations.find(lang);
  if (it == entry.translations.end() || it->second.state != TranslationState::Captured) {
    throw Error(Errc::NotCaptured, entry.id + " " + std::string(language_code(lang)) + " has no captured translation");
  }
  auto& rec = it->second;
  if (rec.captured_by == reviewer.id) {
    throw Error(Errc::SelfReview, "a different actor must review the translation of " + entry.id);
  }
  if (rank(reviewer.role) <= rank(ActorRole::SolverParticipant)) {
    throw Error(Errc::InsufficientRank, "actor '" + reviewer.id + "' has no review authority");
  }
  rec.reviewed_by = reviewer.id;
  rec.state = verdict == Verdict::Approve ? TranslationState::Reviewed : TranslationState::Rejected;
  return rec;
}

const LexicalEntry& Store::attach_asset(const std::filesystem::path& root, std::string_view id, Asset asset) {
  auto& entry = entry_mut(id);
  if (!asset_format_allowed(asset.kind, asset.format)) {
    throw Error(Errc::InvalidAsset, std::string(asset_format_name(asset.format)) + " is not a valid format for " +
                                        std::string(asset_kind_name(asset.kind)));
  }
  std::filesystem::path rel(asset.path);
  if (asset.path.empty() || rel.is_absolute()) {
    throw Error(Errc::InvalidAsset, "asset path must be relative to the store: '" + asset.path + "'");
  }
  auto full = root / rel;
  std::error_code ec;
  auto size = std::filesystem::file_size(full, ec);
  if (ec || !std::filesystem::is_regular_file(full)) {
    throw Error(Errc::MissingFile, "asset file not found: " + full.string());
  }
  if (size != asset.bytes) {
    throw Error(Errc::SizeMismatch, full.string() + " has " + std::to_string(size) + " bytes, declared " +
                                        std::to_string(asset.bytes));
  }
  asset.path = rel.generic_string();
  auto existing = std::find_if(entry.assets.begin(), entry.assets.end(),
                               [&](const Asset& a) { return a.kind == asset.kind && a.language == asset.language; });
  if (existing != entry.assets.end()) {
    *existing = std::move(asset);
  } else {
    entry.assets.push_back(std::move(asset));
  }
  return entry;
}

namespace {

std::string escape_file_chars(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                      c == '-' || c == '.' || c == '\'' || c >= 0x80;
    if (safe) {
      out.push_back(static_cast<char>(c));
    } else {
      char buf[4];
      std::snprintf(buf, sizeof buf, "%%%02X", c);
      out += buf;
    }
  }
  if (out == "." || out == "..") out = "%2E" + out.substr(1);
  return out;
}

}  // namespace

std::string Store::file_stem(const LexicalEntry& entry) const {
  std::size_t same_file = 0;
  for (const auto* other : find_by_lemma(entry.lemma)) {
    if (wn::file_index(other->pos) == wn::file_index(entry.pos)) ++same_file;
  }
  auto stem = escape_file_chars(entry.lemma);
  if (same_file > 1) stem += "-" + wn::format_offset(entry.offset);
  return stem;
}

std::string voice_file_name(std::string_view stem, AssetKind kind) {
  return std::string(stem) + (kind == AssetKind::VoiceDefinition ? "_m.wav" : ".wav");
}

std::string voice_asset_path(const Store& store, const LexicalEntry& entry, AssetKind kind) {
  return "assets/" + std::string(wn::file_suffix(entry.pos)) + "/" + voice_file_name(store.file_stem(entry), kind);
}

std::size_t Store::add_candidates(const std::vector<Candidate>& candidates, std::string_view source) {
  std::size_t added = 0;
  for (const auto& c : candidates) {
    if (c.lemma.empty() || by_lemma_.contains(text::fold_case(c.lemma))) continue;
    auto it = std::find_if(candidates_.begin(), candidates_.end(),
                           [&](const Candidate& cur) { return cur.lemma == c.lemma; });
    if (it == candidates_.end()) {
      Candidate fresh{c.lemma, c.count, {}};
      if (!source.empty()) fresh.sources.emplace_back(source);
      candidates_.push_back(std::move(fresh));
      ++added;
    } else {
      it->count += c.count;
      if (!source.empty() && std::find(it->sources.begin(), it->sources.end(), source) == it->sources.end()) {
        it->sources.emplace_back(source);
      }
    }
  }
  std::stable_sort(candidates_.begin(), candidates_.end(), [](const Candidate& a, const Candidate& b) {
    return a.count != b.count ? a.count > b.count : a.lemma < b.lemma;
  });
  return added;
}

void Store::check_invariants() const {
  for (const auto& e : entries_) {
    for (const auto& [lang, rec] : e.translations) {
      if (rec.state != TranslationState::Reviewed && rec.state != TranslationState::Rejected) continue;
      const std::string where = e.id + " " + std::string(language_code(lang));
      if (!rec.reviewed_by) throw Error(Errc::CorruptRecord, where + ": reviewed record without reviewer");
      if (*rec.reviewed_by == rec.captured_by) throw Error(Errc::CorruptRecord, where + ": reviewer equals capturer");
      const Actor* reviewer = actor(*rec.reviewed_by);
      if (!reviewer || rank(reviewer->role) <= rank(ActorRole::SolverParticipant)) {
        throw Error(Errc::CorruptRecord, where + ": reviewer lacks review authority");
      }
    }
  }
}

// ---- persistence ----

namespace {

json to_json(const TranslationRecord& r) {
  json j = {{"text", r.text},
            {"captured_by", r.captured_by},
            {"state", state_name(r.state)}};
  j["definition"] = r.definition ? json(*r.definition) : json(nullptr);
  j["reviewed_by"] = r.reviewed_by ? json(*r.reviewed_by) : json(nullptr);
  return j;
}

json to_json(const Asset& a) {
  return {{"kind", asset_kind_name(a.kind)},
          {"language", language_code(a.language)},
          {"path", a.path},
          {"bytes", a.bytes},
          {"format", asset_format_name(a.format)}};
}

json to_json(const LexicalEntry& e) {
  json translations = json::object();
  for (const auto& [lang, rec] : e.translations) translations[std::string(language_code(lang))] = to_json(rec);
  json assets = json::array();
  for (const auto& a : e.assets) assets.push_back(to_json(a));
  return {{"id", e.id},
          {"pos", std::string(1, wn::pos_tag(e.pos))},
          {"offset", e.offset},
          {"lemma", e.lemma},
          {"synonym_count", e.synonym_count},
          {"gloss", e.gloss},
          {"translations", std::move(translations)},
          {"assets", std::move(assets)}};
}

template <typename T>
T require(std::optional<T> v, std::string_view what) {
  if (!v) throw std::invalid_argument("bad " + std::string(what));
  return *v;
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

LexicalEntry entry_from_json(const json& j) {
  LexicalEntry e;
  e.id = j.at("id").get<std::string>();
  auto pos = j.at("pos").get<std::string>();
  e.pos = require(pos.size() == 1 ? wn::pos_from_tag(pos[0]) : std::nullopt, "pos");
  e.offset = j.at("offset").get<std::uint32_t>();
  e.lemma = j.at("lemma").get<std::string>();
  e.synonym_count = j.at("synonym_count").get<std::uint32_t>();
  e.gloss = j.at("gloss").get<std::string>();
  if (e.id != entry_id(e.pos, e.offset)) throw std::invalid_argument("id does not match pos/offset");
  if (e.lemma.empty() || e.synonym_count < 1) throw std::invalid_argument("empty lemma or synonym_count < 1");
  for (const auto& [code, rj] : j.at("translations").items()) {
    TranslationRecord r;
    r.language = require(language_from_code(code), "translation language");
    if (!is_target_language(r.language)) throw std::invalid_argument("translation language must be es or fr");
    r.text = rj.at("text").get<std::string>();
    r.definition = optional_string(rj, "definition");
    r.captured_by = rj.at("captured_by").get<std::string>();
    r.reviewed_by = optional_string(rj, "reviewed_by");
    r.state = require(state_from_name(rj.at("state").get<std::string>()), "state");
    e.translations.emplace(r.language, std::move(r));
  }
  for (const auto& aj : j.at("assets")) {
    Asset a;
    a.kind = require(asset_kind_from_name(aj.at("kind").get<std::string>()), "asset kind");
    a.language = require(language_from_code(aj.at("language").get<std::string>()), "asset language");
    a.path = aj.at("path").get<std::string>();
    a.bytes = aj.at("bytes").get<std::uint64_t>();
    a.format = require(asset_format_from_name(aj.at("format").get<std::string>()), "asset format");
    if (!asset_format_allowed(a.kind, a.format)) throw std::invalid_argument("asset format not allowed for kind");
    if (e.asset(a.kind, a.language)) throw std::invalid_argument("duplicate asset for (kind, language)");
    e.assets.push_back(std::move(a));
  }
  return e;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw Error(Errc::Io, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::Io, "cannot replace " + path.string() + ": " + ec.message());
}

template <typename Fn>
void for_each_jsonl(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::CorruptRecord, "missing " + path.filename().string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      fn(json::parse(line));
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(Errc::CorruptRecord,
                       path.filename().string() + " line " + std::to_string(line_no) + ": " + e.what(), 0, line_no);
    }
  }
}

}  // namespace

Manifest save_store(const Store& store, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::Io, "cannot create " + dir.string() + ": " + ec.message());

  std::string entries;
  for (const auto& e : store.entries()) {
    entries += to_json(e).dump();
    entries.push_back('\n');
  }
  std::string actors;
  for (const auto& [id, a] : store.actors()) {
    actors += json{{"id", a.id}, {"display_name", a.display_name}, {"role", role_name(a.role)}}.dump();
    actors.push_back('\n');
  }
  std::string candidates;
  for (const auto& c : store.candidates()) {
    candidates += json{{"lemma", c.lemma}, {"count", c.count}, {"sources", c.sources}}.dump();
    candidates.push_back('\n');
  }
  write_file_atomic(dir / "entries.jsonl", entries);
  write_file_atomic(dir / "actors.jsonl", actors);
  write_file_atomic(dir / "candidates.jsonl", candidates);

  Manifest m{std::string(kStoreFormat), store.size(), store.actors().size(), store.candidates().size()};
  json manifest = {{"format", m.format},
                   {"entries", m.entries},
                   {"actors", m.actors},
                   {"candidates", m.candidates},
                   {"files", {"entries.jsonl", "actors.jsonl", "candidates.jsonl"}}};
  // Manifest last: a store is only considered complete once it exists.
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
  return m;
}

Store load_store(const std::filesystem::path& dir) {
  std::ifstream min(dir / "manifest.json", std::ios::binary);
  if (!min) throw Error(Errc::MissingManifest, "no manifest.json in " + dir.string());
  json manifest;
  try {
    manifest = json::parse(min);
  } catch (const std::exception& e) {
    throw Error(Errc::CorruptRecord, std::string("manifest.json: ") + e.what());
  }
  if (manifest.value("format", "") != kStoreFormat) {
    throw Error(Errc::CorruptRecord, "unsupported store format '" + manifest.value("format", "") + "'");
  }

  Store store;
  for_each_jsonl(dir / "actors.jsonl", [&](const json& j) {
    Actor a;
    a.id = j.at("id").get<std::string>();
    a.display_name = j.at("display_name").get<std::string>();
    a.role = require(role_from_name(j.at("role").get<std::string>()), "role");
    store.add_actor(std::move(a));
  });

  std::vector<LexicalEntry> entries;
  std::unordered_map<std::string, bool> seen;
  std::size_t line_no = 0;
  for_each_jsonl(dir / "entries.jsonl", [&](const json& j) {
    ++line_no;
    auto e = entry_from_json(j);
    if (!seen.emplace(e.id, true).second) {
      throw ParseError(Errc::CorruptRecord, "entries.jsonl: duplicate id " + e.id, 0, line_no);
    }
    entries.push_back(std::move(e));
  });
  // upsert_entries only refreshes text fields for known ids; fresh store, so every entry is new.
  store.upsert_entries(std::move(entries));

  std::vector<Candidate> candidates;
  for_each_jsonl(dir / "candidates.jsonl", [&](const json& j) {
    candidates.push_back(
        {j.at("lemma").get<std::string>(), j.at("count").get<std::uint32_t>(), j.at("sources").get<std::vector<std::string>>()});
  });
  store.restore_candidates(std::move(candidates));

  if (manifest.value("entries", std::size_t{0}) != store.size()) {
    throw Error(Errc::CorruptRecord, "manifest declares " + std::to_string(manifest.value("entries", 0)) +
                                         " entries, found " + std::to_string(store.size()));
  }
  store.check_invariants();
  return store;
}

// ---- capture session ----

CaptureSession::CaptureSession(std::string actor_id, Clock::time_point now)
    : actor_(std::move(actor_id)), started_at_(now), updated_at_(now) {
  if (actor_.empty()) throw Error(Errc::InvalidArgument, "capture session needs an actor");
}

void CaptureSession::choose_language(Language lang, Clock::time_point now) {
  if (step_ != CaptureStep::SelectActor) throw Error(Errc::StepOrder, "language already chosen");
  require_target_language(lang);
  language_ = lang;
  step_ = CaptureStep::ChooseLanguage;
  updated_at_ = now;
}

void CaptureSession::fetch_element(std::string entry_id, Clock::time_point now) {
  if (step_ != CaptureStep::ChooseLanguage) throw Error(Errc::StepOrder, "choose a language before fetching an element");
  if (entry_id.empty()) throw Error(Errc::InvalidArgument, "empty entry id");
  entry_ = std::move(entry_id);
  step_ = CaptureStep::FetchElement;
  updated_at_ = now;
}

void CaptureSession::advance(CaptureStep step, Clock::time_point now) {
  if (static_cast<int>(step) <= static_cast<int>(CaptureStep::FetchElement)) {
    throw Error(Errc::StepOrder, "use choose_language/fetch_element for steps 2 and 3");
  }
  if (step_ < CaptureStep::FetchElement) throw Error(Errc::StepOrder, "no element fetched yet");
  if (step <= step_) throw Error(Errc::StepOrder, "capture steps only move forward");
  step_ = step;
  updated_at_ = now;
}

}  // namespace sld::store
