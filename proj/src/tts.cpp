#include "sld/tts.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "sld/text.hpp"

namespace sld::tts {

using json = nlohmann::json;
using store::AssetKind;
using store::Language;
using store::LexicalEntry;

std::string_view export_kind_name(ExportKind kind) noexcept {
  return kind == ExportKind::LemmaOnly ? "lemma" : "definition";
}

std::optional<ExportKind> export_kind_from_name(std::string_view name) noexcept {
  if (name == "lemma") return ExportKind::LemmaOnly;
  if (name == "definition") return ExportKind::LemmaWithDefinition;
  return std::nullopt;
}

AssetKind asset_kind_for(ExportKind kind) noexcept {
  return kind == ExportKind::LemmaOnly ? AssetKind::VoiceLemma : AssetKind::VoiceDefinition;
}

std::string ExportRecord::job_id() const { return entry_id + ":" + std::string(export_kind_name(kind)); }

std::size_t count_characters(std::string_view text) noexcept { return text::count_scalars(text); }

namespace {

ExportRecord make_record(const LexicalEntry& entry, ExportKind kind, std::string_view stem) {
  ExportRecord r;
  r.entry_id = entry.id;
  r.kind = kind;
  if (kind == ExportKind::LemmaWithDefinition) {
    if (text::trim(entry.gloss).empty()) throw Error(Errc::EmptyGloss, entry.id + " has no gloss");
    r.text = entry.lemma + "| " + entry.gloss;
  } else {
    r.text = entry.lemma;
    std::replace(r.text.begin(), r.text.end(), '_', ' ');
  }
  if (r.text.empty()) throw Error(Errc::EmptyText, entry.id + " has no speakable text");
  r.char_count = count_characters(r.text);
  r.output_name =
      std::string(wn::file_suffix(entry.pos)) + "/" + store::voice_file_name(stem, asset_kind_for(kind));
  return r;
}

}  // namespace

ExportRecord export_record(const LexicalEntry& entry, ExportKind kind) {
  std::string stem;
  for (char c : entry.lemma) stem.push_back(c == '/' ? '_' : c);
  return make_record(entry, kind, stem);
}

ExportRecord export_record(const store::Store& store, const LexicalEntry& entry, ExportKind kind) {
  return make_record(entry, kind, store.file_stem(entry));
}

std::vector<ExportRecord> pending_records(const store::Store& store, ExportKind kind,
                                          std::optional<wn::PartOfSpeech> pos) {
  std::vector<ExportRecord> out;
  for (const auto& e : store.entries()) {
    if (pos && wn::file_index(*pos) != wn::file_index(e.pos)) continue;
    if (e.voice_done(asset_kind_for(kind), Language::EN)) continue;
    if (kind == ExportKind::LemmaWithDefinition && text::trim(e.gloss).empty()) continue;
    out.push_back(export_record(store, e, kind));
  }
  return out;
}

MonthsRequired months_required(std::uint64_t total_chars, std::uint64_t budget_chars) {
  if (budget_chars == 0) throw Error(Errc::ZeroBudget, "monthly budget must be positive");
  return {total_chars / budget_chars, total_chars / budget_chars + (total_chars % budget_chars != 0 ? 1 : 0)};
}

bool QuotaLedger::charged(std::string_view job_id) const {
  return std::find(jobs.begin(), jobs.end(), job_id) != jobs.end();
}

void QuotaLedger::charge(std::string job_id, std::uint64_t chars) {
  if (chars > remaining()) {
    throw Error(Errc::OverBudget, "charging " + std::to_string(chars) + " chars exceeds the " +
                                      std::to_string(remaining()) + " left in " + month);
  }
  used_chars += chars;
  jobs.push_back(std::move(job_id));
}

bool valid_month(std::string_view m) {
  if (m.size() != 7 || m[4] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6}) {
    if (m[i] < '0' || m[i] > '9') return false;
  }
  int month = (m[5] - '0') * 10 + (m[6] - '0');
  return month >= 1 && month <= 12;
}

std::string_view job_state_name(JobState state) noexcept {
  switch (state) {
    case JobState::Pending: return "pending";
    case JobState::Done: return "done";
    case JobState::Failed: return "failed";
  }
  return "";
}

std::optional<JobState> job_state_from_name(std::string_view name) noexcept {
  for (auto s : {JobState::Pending, JobState::Done, JobState::Failed}) {
    if (job_state_name(s) == name) return s;
  }
  return std::nullopt;
}

MonthPlan plan_month(std::span<const ExportRecord> records, const QuotaLedger& ledger, std::string_view voice_id) {
  MonthPlan plan;
  plan.month = ledger.month;
  std::uint64_t remaining = ledger.remaining();
  std::unordered_set<std::string> seen(ledger.jobs.begin(), ledger.jobs.end());
  for (const auto& r : records) {
    if (!seen.insert(r.job_id()).second) continue;
    if (r.char_count > remaining) {
      ++plan.skipped;
      continue;
    }
    remaining -= r.char_count;
    plan.total_chars += r.char_count;
    SynthesisJob job;
    job.record = r;
    job.voice_id = std::string(voice_id);
    plan.jobs.push_back(std::move(job));
  }
  return plan;
}

// ---- execution ----

namespace {

bool looks_like_wav(std::string_view b) {
  return b.size() > kWavHeaderBytes && b.substr(0, 4) == "RIFF" && b.substr(8, 4) == "WAVE";
}

void ensure_writable(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error(Errc::OutputDirUnwritable, "cannot create output directory " + dir.string());
  }
  auto probe = dir / ".sld-write-probe";
  {
    std::ofstream out(probe, std::ios::binary | std::ios::trunc);
    if (!out || !(out << 'x') || !out.flush()) {
      throw Error(Errc::OutputDirUnwritable, "output directory is not writable: " + dir.string());
    }
  }
  std::filesystem::remove(probe, ec);
}

}  // namespace

ExecutionReport execute_plan(MonthPlan& plan, ProviderClient& client, const ExecuteOptions& options,
                             QuotaLedger& ledger) {
  const auto started = std::chrono::steady_clock::now();
  ExecutionReport report;
  ensure_writable(options.out_dir);

  // Jobs already done (in this plan or, for a resumed plan, already voiced in the store) are not re-sent.
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < plan.jobs.size(); ++i) {
    auto& job = plan.jobs[i];
    if (job.state != JobState::Done && options.store) {
      if (const auto* e = options.store->find(job.record.entry_id);
          e && e->voice_done(asset_kind_for(job.record.kind), Language::EN)) {
        job.state = JobState::Done;
        job.result_bytes = e->asset(asset_kind_for(job.record.kind), Language::EN)->bytes;
      }
    }
    if (job.state != JobState::Done) todo.push_back(i);
  }

  std::mutex mu;  // guards ledger, store, report counters and the halt flag
  std::uint64_t reserved = 0;
  bool halted = false;
  std::size_t next = 0;

  auto worker = [&] {
    for (;;) {
      std::size_t idx;
      {
        std::lock_guard lock(mu);
        if (halted || next >= todo.size()) return;
        idx = todo[next];
        auto& job = plan.jobs[idx];
        if (job.record.char_count > ledger.remaining() - reserved) {
          // The month is spent; this and later jobs wait for the next ledger.
          halted = true;
          return;
        }
        reserved += job.record.char_count;
        ++next;
        ++report.provider_calls;
      }
      auto& job = plan.jobs[idx];
      std::string audio;
      std::optional<ProviderErrorKind> failure;
      std::string message;
      try {
        ProviderConfig cfg = options.provider;
        cfg.voice_id = job.voice_id;
        audio = client.synthesize(build_request(cfg, job.record.text));
        if (!looks_like_wav(audio)) {
          failure = ProviderErrorKind::BadRequest;
          message = "provider returned " + std::to_string(audio.size()) + " bytes that are not a WAV file";
        }
      } catch (const ProviderError& e) {
        failure = e.kind();
        message = e.what();
      } catch (const std::exception& e) {
        failure = ProviderErrorKind::BadRequest;
        message = e.what();
      }

      std::filesystem::path file;
      if (!failure) {
        file = options.out_dir / job.record.output_name;
        std::error_code ec;
        std::filesystem::create_directories(file.parent_path(), ec);
        std::ofstream out(file, std::ios::binary | std::ios::trunc);
        if (!out || !out.write(audio.data(), static_cast<std::streamsize>(audio.size())) || !out.flush()) {
          failure = ProviderErrorKind::BadRequest;
          message = "cannot write " + file.string();
        }
      }

      std::lock_guard lock(mu);
      reserved -= job.record.char_count;
      if (failure) {
        job.error = message;
        if (*failure == ProviderErrorKind::QuotaExceeded || *failure == ProviderErrorKind::Auth) {
          if (!report.halted_by) report.halted_by = failure;
          halted = true;
          if (*failure == ProviderErrorKind::QuotaExceeded) continue;  // stays Pending, resumable
        }
        job.state = JobState::Failed;
        continue;
      }
      ledger.charge(job.record.job_id(), job.record.char_count);
      job.state = JobState::Done;
      job.result_bytes = audio.size();
      job.error.clear();
      report.bytes_total += audio.size();
      ++report.written;
      if (options.store) {
        store::Asset asset;
        asset.kind = asset_kind_for(job.record.kind);
        asset.language = Language::EN;
        asset.path = std::filesystem::proximate(file, options.store_root).generic_string();
        asset.bytes = audio.size();
        asset.format = store::AssetFormat::Wav;
        options.store->attach_asset(options.store_root, job.record.entry_id, std::move(asset));
      }
    }
  };

  const std::size_t n = std::max<std::size_t>(1, std::min(options.concurrency, todo.size()));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
  }

  for (const auto& job : plan.jobs) {
    switch (job.state) {
      case JobState::Done: ++report.done; break;
      case JobState::Failed: ++report.failed; break;
      case JobState::Pending: ++report.pending; break;
    }
  }
  report.elapsed = std::chrono::steady_clock::now() - started;
  return report;
}

// ---- reports ----

CoverageRow coverage_row(wn::PartOfSpeech pos, std::size_t voiced, std::size_t total, std::uint64_t unvoiced_chars,
                         std::uint64_t budget_chars, double threshold) {
  CoverageRow row;
  row.pos = pos;
  row.voiced = voiced;
  row.total = total;
  row.fraction = total == 0 ? 0.0 : static_cast<double>(voiced) / static_cast<double>(total);
  row.ready = total != 0 && row.fraction >= threshold;
  row.months_remaining = months_required(unvoiced_chars, budget_chars).ceil;
  return row;
}

std::vector<CoverageRow> coverage_report(const store::Store& store, double threshold, std::uint64_t budget_chars) {
  std::array<std::size_t, 4> voiced{}, total{};
  std::array<std::uint64_t, 4> chars{};
  for (const auto& e : store.entries()) {
    auto i = wn::file_index(e.pos);
    ++total[i];
    if (e.voice_done(AssetKind::VoiceDefinition, Language::EN)) {
      ++voiced[i];
    } else if (!text::trim(e.gloss).empty()) {
      chars[i] += export_record(e, ExportKind::LemmaWithDefinition).char_count;
    }
  }
  std::vector<CoverageRow> out;
  for (std::size_t i = 0; i < wn::kFilePos.size(); ++i) {
    out.push_back(coverage_row(wn::kFilePos[i], voiced[i], total[i], chars[i], budget_chars, threshold));
  }
  return out;
}

Throughput throughput_report(const ExecutionReport& report) {
  if (report.done == 0) throw Error(Errc::NoCompletedJobs, "no completed jobs to report on");
  const double minutes = report.elapsed.count() / 60.0;
  if (!(minutes > 0)) throw Error(Errc::InvalidArgument, "elapsed time must be positive");
  auto round2 = [](double v) { return std::round(v * 100.0) / 100.0; };
  return {round2(static_cast<double>(report.done) / minutes),
          round2(static_cast<double>(report.bytes_total) / static_cast<double>(report.done))};
}

// ---- files ----

namespace {

json job_to_json(const SynthesisJob& j) {
  json out = {{"entry_id", j.record.entry_id},
              {"kind", export_kind_name(j.record.kind)},
              {"char_count", j.record.char_count},
              {"output_name", j.record.output_name},
              {"voice_id", j.voice_id},
              {"text", j.record.text},
              {"state", job_state_name(j.state)}};
  out["result_bytes"] = j.result_bytes ? json(*j.result_bytes) : json(nullptr);
  if (!j.error.empty()) out["error"] = j.error;
  return out;
}

SynthesisJob job_from_json(const json& j) {
  SynthesisJob job;
  job.record.entry_id = j.at("entry_id").get<std::string>();
  auto kind = export_kind_from_name(j.at("kind").get<std::string>());
  if (!kind) throw std::invalid_argument("bad kind");
  job.record.kind = *kind;
  job.record.text = j.at("text").get<std::string>();
  job.record.char_count = j.at("char_count").get<std::size_t>();
  if (job.record.char_count != count_characters(job.record.text)) {
    throw std::invalid_argument("char_count does not match text");
  }
  job.record.output_name = j.at("output_name").get<std::string>();
  job.voice_id = j.at("voice_id").get<std::string>();
  auto state = job_state_from_name(j.at("state").get<std::string>());
  if (!state) throw std::invalid_argument("bad state");
  job.state = *state;
  if (j.contains("result_bytes") && !j["result_bytes"].is_null()) job.result_bytes = j["result_bytes"].get<std::uint64_t>();
  if (j.contains("error")) job.error = j["error"].get<std::string>();
  return job;
}

void write_text(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out || !(out << contents) || !out.flush()) throw Error(Errc::Io, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::Io, "cannot replace " + path.string() + ": " + ec.message());
}

}  // namespace

void write_plan_file(const std::filesystem::path& path, const MonthPlan& plan) {
  std::string out = json{{"month", plan.month},
                         {"total_chars", plan.total_chars},
                         {"skipped", plan.skipped},
                         {"jobs", plan.jobs.size()}}
                        .dump() +
                    "\n";
  for (const auto& j : plan.jobs) out += job_to_json(j).dump() + "\n";
  write_text(path, out);
}

MonthPlan read_plan_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open plan " + path.string());
  MonthPlan plan;
  std::string line;
  std::size_t line_no = 0;
  std::size_t declared = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      auto j = json::parse(line);
      if (line_no == 1) {
        plan.month = j.at("month").get<std::string>();
        plan.total_chars = j.at("total_chars").get<std::uint64_t>();
        plan.skipped = j.value("skipped", std::size_t{0});
        declared = j.at("jobs").get<std::size_t>();
      } else {
        plan.jobs.push_back(job_from_json(j));
      }
    } catch (const std::exception& e) {
      throw ParseError(Errc::CorruptRecord, path.filename().string() + " line " + std::to_string(line_no) + ": " + e.what(),
                       0, line_no);
    }
  }
  if (line_no == 0) throw Error(Errc::CorruptRecord, "empty plan file " + path.string());
  std::uint64_t sum = 0;
  for (const auto& j : plan.jobs) sum += j.record.char_count;
  if (declared != plan.jobs.size() || sum != plan.total_chars) {
    throw Error(Errc::CorruptRecord, "plan header disagrees with its job lines in " + path.string());
  }
  return plan;
}

std::map<std::string, QuotaLedger> read_ledgers(const std::filesystem::path& path) {
  std::map<std::string, QuotaLedger> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      auto j = json::parse(line);
      QuotaLedger l;
      l.month = j.at("month").get<std::string>();
      l.budget_chars = j.at("budget_chars").get<std::uint64_t>();
      l.used_chars = j.at("used_chars").get<std::uint64_t>();
      l.jobs = j.at("jobs").get<std::vector<std::string>>();
      if (!valid_month(l.month)) throw std::invalid_argument("bad month");
      if (l.used_chars > l.budget_chars) throw std::invalid_argument("used_chars exceeds budget_chars");
      out[l.month] = std::move(l);
    } catch (const std::exception& e) {
      throw ParseError(Errc::CorruptRecord, path.filename().string() + " line " + std::to_string(line_no) + ": " + e.what(),
                       0, line_no);
    }
  }
  return out;
}

void write_ledgers(const std::filesystem::path& path, const std::map<std::string, QuotaLedger>& ledgers) {
  std::string out;
  for (const auto& [month, l] : ledgers) {
    out += json{{"month", l.month}, {"budget_chars", l.budget_chars}, {"used_chars", l.used_chars}, {"jobs", l.jobs}}
               .dump() +
           "\n";
  }
  write_text(path, out);
}

}  // namespace sld::tts
