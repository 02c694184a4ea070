#include "sld/service.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <httplib.h>
#include <json.hpp>
#include <mutex>
#include <shared_mutex>
#include <sstream>

#include "sld/text.hpp"

namespace sld::service {

using json = nlohmann::json;
using store::Language;
using store::LexicalEntry;

int http_status_for(Errc code) noexcept {
  switch (code) {
    case Errc::UnknownEntry:
    case Errc::UnknownActor:
      return 404;
    case Errc::SelfReview:
    case Errc::AlreadyReviewed:
    case Errc::InsufficientRank:
    case Errc::NotCaptured:
    case Errc::WorkflowConflict:
    case Errc::DuplicateActor:
      return 409;
    case Errc::ProviderAuth:
    case Errc::ProviderQuotaExceeded:
    case Errc::ProviderNetwork:
    case Errc::ProviderBadRequest:
      return 503;
    case Errc::Io:
    case Errc::CorruptRecord:
    case Errc::MissingManifest:
    case Errc::OutputDirUnwritable:
      return 500;
    default:
      return 400;
  }
}

namespace {

// Thrown by request parsing helpers; becomes a 400.
struct BadRequest : Error {
  explicit BadRequest(const std::string& m) : Error(Errc::InvalidArgument, m) {}
};

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send_json(res, status, {{"error", code}, {"message", message}});
}

json parse_body(const httplib::Request& req) {
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw BadRequest("request body must be a JSON object");
  return j;
}

std::string required_string(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) throw BadRequest(std::string("missing string field '") + key + "'");
  return j[key].get<std::string>();
}

Language parse_language(std::string_view code) {
  auto lang = store::language_from_code(code);
  if (!lang) throw Error(Errc::InvalidLanguage, "unknown language '" + std::string(code) + "'");
  return *lang;
}

json record_json(const store::TranslationRecord& r) {
  json j = {{"language", store::language_code(r.language)},
            {"text", r.text},
            {"captured_by", r.captured_by},
            {"state", store::state_name(r.state)}};
  j["definition"] = r.definition ? json(*r.definition) : json(nullptr);
  j["reviewed_by"] = r.reviewed_by ? json(*r.reviewed_by) : json(nullptr);
  return j;
}

json work_item(const LexicalEntry& e) {
  json translations = json::object();
  for (auto lang : {Language::ES, Language::FR}) {
    const auto* r = e.translation(lang);
    translations[std::string(store::language_code(lang))] = r ? record_json(*r) : json(nullptr);
  }
  json assets = json::array();
  for (const auto& a : e.assets) {
    assets.push_back({{"kind", store::asset_kind_name(a.kind)},
                      {"language", store::language_code(a.language)},
                      {"format", store::asset_format_name(a.format)},
                      {"bytes", a.bytes}});
  }
  return {{"entry_id", e.id},
          {"pos", std::string(1, wn::pos_tag(e.pos))},
          {"lemma", e.lemma},
          {"synonym_count", e.synonym_count},
          {"gloss", e.gloss},
          {"translations", std::move(translations)},
          {"audio",
           {{"lemma", e.voice_done(store::AssetKind::VoiceLemma, Language::EN)},
            {"definition", e.voice_done(store::AssetKind::VoiceDefinition, Language::EN)}}},
          {"assets", std::move(assets)}};
}

bool matches_status(const LexicalEntry& e, Language lang, std::string_view status) {
  const auto* r = e.translation(lang);
  if (status == "pending") {
    return !r || r->state == store::TranslationState::Draft || r->state == store::TranslationState::Rejected;
  }
  auto wanted = store::state_from_name(status);
  if (!wanted) throw BadRequest("unknown status '" + std::string(status) + "'");
  return r && r->state == *wanted;
}

std::size_t parse_count(const httplib::Request& req, const char* key, std::size_t fallback) {
  if (!req.has_param(key)) return fallback;
  auto v = req.get_param_value(key);
  try {
    std::size_t used = 0;
    auto n = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw BadRequest(std::string("bad '") + key + "' parameter");
  }
}

std::string current_month() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d", tm.tm_year + 1900, tm.tm_mon + 1);
  return buf;
}

json ledger_json(const tts::QuotaLedger& l) {
  return {{"month", l.month},
          {"budget_chars", l.budget_chars},
          {"used_chars", l.used_chars},
          {"remaining_chars", l.remaining()},
          {"jobs", l.jobs.size()}};
}

}  // namespace

struct Service::Impl {
  store::Store store;
  ServiceOptions options;
  mutable std::shared_mutex mu;
  httplib::Server server;

  Impl(store::Store s, ServiceOptions o) : store(std::move(s)), options(std::move(o)) { routes(); }

  void persist() {
    if (!options.store_dir.empty()) store::save_store(store, options.store_dir);
  }

  // Runs `fn` with error mapping. Errors from the store carry their own status.
  template <typename Fn>
  static void guarded(httplib::Response& res, Fn&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      send_error(res, http_status_for(e.code()), errc_name(e.code()), e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "invalid_json", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Get("/api/actors", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        std::shared_lock lock(mu);
        json out = json::array();
        for (const auto& [id, a] : store.actors()) {
          out.push_back({{"id", a.id},
                         {"display_name", a.display_name},
                         {"role", store::role_name(a.role)},
                         {"rank", store::rank(a.role)}});
        }
        send_json(res, 200, out);
      });
    });

    server.Post("/api/actors", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto body = parse_body(req);
        store::Actor a;
        a.id = required_string(body, "id");
        a.display_name = body.value("display_name", a.id);
        auto role = store::role_from_name(required_string(body, "role"));
        if (!role) throw BadRequest("unknown role");
        a.role = *role;
        std::unique_lock lock(mu);
        store.add_actor(a);
        persist();
        send_json(res, 201, {{"id", a.id}, {"display_name", a.display_name}, {"role", store::role_name(a.role)}});
      });
    });

    server.Get("/api/entries", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        std::optional<Language> lang;
        if (req.has_param("lang")) lang = parse_language(req.get_param_value("lang"));
        std::string status = req.has_param("status") ? req.get_param_value("status") : "";
        if (!status.empty() && (!lang || !store::is_target_language(*lang))) {
          throw BadRequest("status filter needs lang=es or lang=fr");
        }
        if (!status.empty() && status != "pending" && !store::state_from_name(status)) {
          throw BadRequest("unknown status '" + status + "'");
        }
        std::optional<wn::PartOfSpeech> pos;
        if (req.has_param("pos")) {
          pos = wn::pos_from_name(req.get_param_value("pos"));
          if (!pos) throw BadRequest("unknown pos");
        }
        const auto page = std::max<std::size_t>(1, parse_count(req, "page", 1));
        const auto page_size =
            std::clamp<std::size_t>(parse_count(req, "page_size", options.default_page_size), 1, options.max_page_size);

        std::shared_lock lock(mu);
        json items = json::array();
        std::size_t total = 0;
        const std::size_t first = (page - 1) * page_size;
        for (const auto& e : store.entries()) {
          if (pos && wn::file_index(*pos) != wn::file_index(e.pos)) continue;
          if (!status.empty() && !matches_status(e, *lang, status)) continue;
          if (total >= first && total < first + page_size) items.push_back(work_item(e));
          ++total;
        }
        send_json(res, 200, {{"page", page}, {"page_size", page_size}, {"total", total}, {"items", std::move(items)}});
      });
    });

    server.Get(R"(/api/entries/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        std::shared_lock lock(mu);
        const auto* e = store.find(req.matches[1].str());
        if (!e) throw Error(Errc::UnknownEntry, "unknown entry '" + req.matches[1].str() + "'");
        send_json(res, 200, work_item(*e));
      });
    });

    server.Post(R"(/api/entries/([^/]+)/translation)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto body = parse_body(req);
        auto lang = parse_language(required_string(body, "lang"));
        auto text_value = body.contains("text") && body["text"].is_string() ? body["text"].get<std::string>() : "";
        std::optional<std::string> definition;
        if (body.contains("definition") && body["definition"].is_string()) definition = body["definition"].get<std::string>();
        auto actor = required_string(body, "actor");
        const bool draft = body.value("draft", false);
        std::unique_lock lock(mu);
        auto rec = draft ? store.save_draft(req.matches[1].str(), lang, std::move(text_value), std::move(definition), actor)
                         : store.capture_translation(req.matches[1].str(), lang, std::move(text_value),
                                                     std::move(definition), actor);
        persist();
        send_json(res, 200, record_json(rec));
      });
    });

    server.Post(R"(/api/entries/([^/]+)/review)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto body = parse_body(req);
        auto lang = parse_language(required_string(body, "lang"));
        auto actor = required_string(body, "actor");
        auto verdict_name = required_string(body, "verdict");
        store::Verdict verdict;
        if (verdict_name == "approve") {
          verdict = store::Verdict::Approve;
        } else if (verdict_name == "reject") {
          verdict = store::Verdict::Reject;
        } else {
          throw BadRequest("verdict must be approve or reject");
        }
        std::unique_lock lock(mu);
        auto rec = store.review_translation(req.matches[1].str(), lang, actor, verdict);
        persist();
        send_json(res, 200, record_json(rec));
      });
    });

    server.Post(R"(/api/entries/([^/]+)/image)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { attach_image(req, res); });
    });

    server.Get(R"(/api/entries/([^/]+)/audio)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto kind_name = req.has_param("kind") ? req.get_param_value("kind") : "lemma";
        auto kind = tts::export_kind_from_name(kind_name);
        if (!kind) throw BadRequest("kind must be lemma or definition");
        auto lang = parse_language(req.has_param("lang") ? req.get_param_value("lang") : "en");
        std::filesystem::path file;
        store::AssetFormat format;
        {
          std::shared_lock lock(mu);
          const auto* e = store.find(req.matches[1].str());
          if (!e) throw Error(Errc::UnknownEntry, "unknown entry '" + req.matches[1].str() + "'");
          const auto* a = e->asset(tts::asset_kind_for(*kind), lang);
          if (!a) {
            send_error(res, 404, "no_audio", "no " + kind_name + " audio for " + e->id);
            return;
          }
          file = options.store_dir / a->path;
          format = a->format;
        }
        std::ifstream in(file, std::ios::binary);
        if (!in) throw Error(Errc::Io, "audio file missing on disk");
        std::ostringstream buf;
        buf << in.rdbuf();
        res.status = 200;
        res.set_content(std::move(buf).str(), format == store::AssetFormat::Mp3 ? "audio/mpeg" : "audio/wav");
      });
    });

    server.Get("/api/stats", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto month = req.has_param("month") ? req.get_param_value("month") : current_month();
        if (!tts::valid_month(month)) throw BadRequest("month must be YYYY-MM");
        json coverage = json::array();
        {
          std::shared_lock lock(mu);
          for (const auto& row : tts::coverage_report(store, options.readiness_threshold, options.budget_chars)) {
            coverage.push_back({{"pos", wn::file_suffix(row.pos)},
                                {"voiced", row.voiced},
                                {"total", row.total},
                                {"fraction", row.fraction},
                                {"ready", row.ready},
                                {"months_remaining", row.months_remaining}});
          }
        }
        tts::QuotaLedger ledger{month, options.budget_chars, 0, {}};
        if (!options.ledger_path.empty()) {
          auto all = tts::read_ledgers(options.ledger_path);
          if (auto it = all.find(month); it != all.end()) ledger = it->second;
        }
        send_json(res, 200,
                  {{"threshold", options.readiness_threshold}, {"coverage", std::move(coverage)}, {"ledger", ledger_json(ledger)}});
      });
    });

    server.Post("/api/plan", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto body = parse_body(req);
        auto month = required_string(body, "month");
        if (!tts::valid_month(month)) throw BadRequest("month must be YYYY-MM");
        auto budget = body.value("budget", options.budget_chars);
        if (budget == 0) throw Error(Errc::ZeroBudget, "budget must be positive");
        auto kind = tts::export_kind_from_name(body.value("kind", std::string("definition")));
        if (!kind) throw BadRequest("kind must be lemma or definition");
        std::optional<wn::PartOfSpeech> pos;
        if (body.contains("pos")) {
          pos = wn::pos_from_name(body["pos"].get<std::string>());
          if (!pos) throw BadRequest("unknown pos");
        }
        tts::QuotaLedger ledger{month, budget, 0, {}};
        if (!options.ledger_path.empty()) {
          auto all = tts::read_ledgers(options.ledger_path);
          if (auto it = all.find(month); it != all.end()) {
            ledger = it->second;
            if (budget < ledger.used_chars) throw BadRequest("budget is below what the month already used");
            ledger.budget_chars = budget;
          }
        }
        std::vector<tts::ExportRecord> records;
        {
          std::shared_lock lock(mu);
          records = tts::pending_records(store, *kind, pos);
        }
        std::uint64_t pending_chars = 0;
        for (const auto& r : records) pending_chars += r.char_count;
        auto plan = tts::plan_month(records, ledger);
        auto months = tts::months_required(pending_chars, budget);
        send_json(res, 200,
                  {{"month", plan.month},
                   {"budget_chars", budget},
                   {"jobs", plan.jobs.size()},
                   {"total_chars", plan.total_chars},
                   {"skipped", plan.skipped},
                   {"pending_records", records.size()},
                   {"pending_chars", pending_chars},
                   {"months_required", {{"floor", months.floor}, {"ceil", months.ceil}}}});
      });
    });
  }

  void attach_image(const httplib::Request& req, httplib::Response& res) {
    if (!req.is_multipart_form_data()) throw BadRequest("expected multipart/form-data");
    const char* field = req.has_file("image") ? "image" : req.has_file("file") ? "file" : nullptr;
    if (!field) throw BadRequest("missing 'image' file part");
    auto part = req.get_file_value(field);
    if (part.content.empty()) throw BadRequest("empty image");
    auto lang = parse_language(req.has_file("lang") ? req.get_file_value("lang").content : "en");

    std::string ext = std::filesystem::path(part.filename).extension().string();
    if (!ext.empty()) ext.erase(0, 1);
    ext = text::fold_case(ext);
    if (ext.empty()) {
      if (part.content_type == "image/png") ext = "png";
      if (part.content_type == "image/jpeg") ext = "jpg";
    }
    auto format = store::asset_format_from_name(ext);
    if (!format || !store::asset_format_allowed(store::AssetKind::Image, *format)) {
      throw Error(Errc::InvalidAsset, "images must be png or jpg");
    }
    if (options.store_dir.empty()) throw Error(Errc::Io, "service has no store directory for assets");

    std::unique_lock lock(mu);
    const auto* e = store.find(req.matches[1].str());
    if (!e) throw Error(Errc::UnknownEntry, "unknown entry '" + req.matches[1].str() + "'");
    const std::string rel = "assets/img/" + std::string(wn::file_suffix(e->pos)) + "/" + store.file_stem(*e) + "_" +
                            std::string(store::language_code(lang)) + "." +
                            std::string(store::asset_format_name(*format));
    auto full = options.store_dir / rel;
    std::filesystem::create_directories(full.parent_path());
    {
      std::ofstream out(full, std::ios::binary | std::ios::trunc);
      if (!out || !out.write(part.content.data(), static_cast<std::streamsize>(part.content.size())) || !out.flush()) {
        throw Error(Errc::Io, "cannot write image");
      }
    }
    store::Asset asset{store::AssetKind::Image, lang, rel, part.content.size(), *format};
    const auto& updated = store.attach_asset(options.store_dir, e->id, asset);
    persist();
    send_json(res, 200, work_item(updated));
  }
};

Service::Service(store::Store store, ServiceOptions options)
    : impl_(std::make_unique<Impl>(std::move(store), std::move(options))) {}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(Errc::Io, "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void Service::run() { impl_->server.listen_after_bind(); }

void Service::stop() {
  if (impl_) impl_->server.stop();
}

void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

store::Store Service::snapshot() const {
  std::shared_lock lock(impl_->mu);
  return impl_->store;
}

}  // namespace sld::service
